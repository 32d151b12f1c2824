"""Scenario configuration, figure presets and the scenario runner.

A scenario is a flat ``key = value`` text file with ``#`` comments. Keys
ending in ``_us`` or ``_khz`` are converted to seconds and hertz when the
file is parsed.
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import ajc_hierarchy, carrier_pfunc, coupling_estimates, heuristic_fit, lindblad_oracle
from . import output
from .errors import ConfigError, DomainError
from .pulses import PulseParams, apply_ajc, apply_carrier, apply_jc
from .states import FockSpinVector, SpinLabel, TimeSeries, expect_number, expect_sigma_z

MODES = ("ajc", "ajc_oracle", "carrier", "carrier_grid", "heuristic",
         "coupling_sweep", "langevin", "pulse_demo")
FORMATS = ("csv", "svg", "both")

_TIME = ("t_max_s", "dt_s")
_SYSTEM = ("chi", "q", "rho_number", "reduced_mass", "rel_velocity")
_QUANTIZED = ("ion_mass", "trap_freq", "rho_mass", "z", "S")

REQUIRED = {
    "ajc": ("eta_l", "omega_hz", "gamma_over_g", "nbar", "n0") + _TIME,
    "ajc_oracle": ("eta_l", "omega_hz", "gamma_over_g", "nbar", "n0") + _TIME,
    "carrier": ("gamma", "nu", "nbar", "alpha_re", "alpha_im") + _TIME,
    "carrier_grid": ("gamma", "nu", "nbar", "alpha_re", "alpha_im", "gamma_t"),
    "heuristic": ("eta_l", "omega_hz", "gamma0", "n0") + _TIME,
    "coupling_sweep": _SYSTEM + _QUANTIZED + ("disp_amplitude", "k_min", "k_max", "k_points"),
    "langevin": _SYSTEM,
    "pulse_demo": ("pulse", "eta_l", "omega_hz", "n0", "spin") + _TIME,
}

DEFAULTS = {
    "ajc": {"truncation": 4, "phi": 0.0, "overlay_heuristic": False,
            "gamma0": heuristic_fit.GAMMA0_EXPERIMENT,
            "exponent": heuristic_fit.DEFAULT_EXPONENT, "rabi_source": "g"},
    "ajc_oracle": {"n_max": 12, "phi": 0.0},
    "carrier": {"omega_hz": 0.0, "phi": 0.0},
    "carrier_grid": {"grid_n": 201},
    "heuristic": {"exponent": heuristic_fit.DEFAULT_EXPONENT, "rabi_source": "g"},
    "coupling_sweep": {"disp_exponent": 1.5, "r": 1e-9},
    "langevin": {"r": 1e-9},
    "pulse_demo": {"phi": 0.0, "n_max": None},
}

_INT_KEYS = {"n0", "truncation", "n_max", "grid_n", "k_points"}
_STR_KEYS = {"mode", "output", "format", "pulse", "spin", "rabi_source", "overlay", "gamma_t"}
_BOOL_KEYS = {"overlay_heuristic"}
_CHOICES = {"pulse": ("carrier", "jc", "ajc"), "spin": ("down", "up"),
            "rabi_source": ("g", "omega")}


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _convert_suffix(key, value):
    if key.endswith("_us"):
        return key[:-3] + "_s", float(value) * 1e-6
    if key.endswith("_khz"):
        base = key[:-4]
        target = base + "_hz" if base in ("omega",) else base
        return target, float(value) * 1e3
    return key, value


def parse_config_text(text):
    """Parse ``key = value`` lines into an ordered dict of raw strings/floats."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        key, value = _convert_suffix(key, value)
        values[key] = value
    return values


def config_from_header(comment_lines):
    """Recover the scenario mapping echoed at the top of an output CSV."""
    text = []
    for line in comment_lines:
        body = line.lstrip("#").strip()
        if "=" in body and not body.startswith("derived "):
            text.append(body)
    return parse_config_text("\n".join(text))


def _coerce(key, value):
    if key in _STR_KEYS:
        value = str(value)
        if key in _CHOICES and value not in _CHOICES[key]:
            raise ConfigError(f"{key} must be one of {_CHOICES[key]}, got {value!r}", key)
        return value
    if key in _BOOL_KEYS:
        if isinstance(value, bool):
            return value
        text = str(value).lower()
        if text in ("true", "yes", "1"):
            return True
        if text in ("false", "no", "0"):
            return False
        raise ConfigError(f"{key} must be true/false, got {value!r}", key)
    if value is None:
        return None
    try:
        num = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be numeric, got {value!r}", key) from None
    if not math.isfinite(num):
        raise ConfigError(f"{key} must be finite, got {value!r}", key)
    if key in _INT_KEYS:
        if num != int(num):
            raise ConfigError(f"{key} must be an integer, got {value!r}", key)
        return int(num)
    return num


@dataclass(frozen=True)
class ScenarioConfig:
    mode: str
    values: dict
    output: str = "scenario"
    format: str = "both"
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, mapping):
        mapping = dict(mapping)
        if "mode" not in mapping:
            raise ConfigError("missing required key 'mode'", "mode")
        mode = str(mapping.pop("mode"))
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {mode!r}", "mode")
        out = str(mapping.pop("output", "scenario"))
        fmt_ = str(mapping.pop("format", "both"))
        if fmt_ not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {fmt_!r}", "format")
        overlay = mapping.pop("overlay", None)

        values = {}
        for key in REQUIRED[mode]:
            if key not in mapping:
                raise ConfigError(f"missing required key {key!r} for mode {mode!r}", key)
            values[key] = _coerce(key, mapping.pop(key))
        for key, default in DEFAULTS.get(mode, {}).items():
            values[key] = _coerce(key, mapping.pop(key)) if key in mapping else default
        # keys accepted by every mode for provenance only
        extra = {k: str(v) for k, v in mapping.items()}
        if overlay is not None:
            extra["overlay"] = str(overlay)
        cfg = cls(mode, values, out, fmt_, extra)
        cfg._validate()
        return cfg

    @classmethod
    def from_text(cls, text):
        return cls.from_mapping(parse_config_text(text))

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_text(fh.read())

    def _validate(self):
        v = self.values
        if "dt_s" in v:
            if v["dt_s"] <= 0:
                raise ConfigError("dt_s must be > 0", "dt_s")
            if v["t_max_s"] < 0:
                raise ConfigError("t_max_s must be >= 0", "t_max_s")
        if "n0" in v and v["n0"] < 0:
            raise ConfigError("n0 must be >= 0", "n0")
        if self.mode == "carrier_grid":
            self.gamma_t_values()

    def gamma_t_values(self):
        try:
            vals = [float(x) for x in str(self.values["gamma_t"]).split(",") if x.strip()]
        except ValueError:
            raise ConfigError("gamma_t must be a comma-separated list of numbers",
                              "gamma_t") from None
        if not vals or any(not (x > 0 and math.isfinite(x)) for x in vals):
            raise ConfigError("gamma_t values must be finite and > 0", "gamma_t")
        return vals

    def items(self):
        """Resolved configuration as ordered ``(key, text)`` pairs."""
        yield "mode", self.mode
        for key, value in self.values.items():
            if value is None:
                continue
            yield key, _echo(value)
        for key, value in self.extra.items():
            yield key, value
        yield "format", self.format

    def derived(self):
        v = self.values
        out = {}
        if "eta_l" in v and "omega_hz" in v:
            out["g_rad_s"] = v["eta_l"] * 2 * math.pi * v["omega_hz"]
            if "gamma_over_g" in v:
                out["gamma_per_s"] = v["gamma_over_g"] * out["g_rad_s"]
        return out

    def header(self):
        return output.header_lines(self.items(), self.derived())

    def t_grid(self):
        v = self.values
        steps = int(round(v["t_max_s"] / v["dt_s"]))
        return v["dt_s"] * np.arange(steps + 1, dtype=float)


def _echo(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

_FIG3 = {
    "mode": "ajc", "eta_l": 0.202, "omega_hz": 475e3, "nbar": 1.0,
    "gamma_over_g": 6.0e-3, "n0": 0, "truncation": 4,
    "t_max_s": 120e-6, "dt_s": 0.1e-6,
}

PRESETS = {
    "fig2": {"mode": "carrier_grid", "gamma": 1.0, "nu": 5.0, "nbar": 1.0,
             "alpha_re": 2.0, "alpha_im": 0.0, "gamma_t": "0.2,0.9", "grid_n": 201},
    "fig3": dict(_FIG3),
    "fig4a": dict(_FIG3, overlay_heuristic=True, gamma0=heuristic_fit.GAMMA0_EXPERIMENT),
    "fig4b": dict(_FIG3, n0=1, overlay_heuristic=True,
                  gamma0=heuristic_fit.GAMMA0_EXPERIMENT),
}


def preset_config(name, out_dir="."):
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    mapping = dict(PRESETS[name], output=os.path.join(out_dir, name), format="both")
    return ScenarioConfig.from_mapping(mapping)


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

@dataclass
class ScenarioResult:
    config: ScenarioConfig
    series: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)
    lines: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    files: list = field(default_factory=list)


def _hierarchy_params(v):
    return ajc_hierarchy.HierarchyParams.from_experiment(
        v["eta_l"], v["omega_hz"], v["gamma_over_g"], v["nbar"],
        truncation=v.get("truncation", 4), n0=v["n0"])


def _rabi(v):
    g = v["eta_l"] * 2 * math.pi * v["omega_hz"]
    return g if v["rabi_source"] == "g" else 2 * math.pi * v["omega_hz"]


def _run_ajc(cfg, res):
    v = cfg.values
    run = ajc_hierarchy.integrate(_hierarchy_params(v), cfg.t_grid())
    res.series["hierarchy"] = run.series
    if v["overlay_heuristic"]:
        hp = heuristic_fit.HeuristicParams.fock(v["n0"], _rabi(v), v["gamma0"], v["exponent"])
        res.series["heuristic"] = heuristic_fit.heuristic_series(hp, cfg.t_grid())


def _run_ajc_oracle(cfg, res):
    v = cfg.values
    hp = _hierarchy_params(dict(v, truncation=max(4, v["n0"] + 1)))
    op = lindblad_oracle.OracleParams(g=hp.g, gamma=hp.gamma, nbar=hp.nbar, phi=v["phi"],
                                      n_max=max(v["n_max"], v["n0"] + 4))
    rho0 = FockSpinVector.basis(op.n_max, v["n0"], SpinLabel.DOWN).to_density_matrix()
    res.series["oracle"] = lindblad_oracle.evolve(op, rho0, cfg.t_grid()).series


def _run_carrier(cfg, res):
    v = cfg.values
    p = carrier_pfunc.CarrierParams(v["gamma"], v["nu"], v["nbar"])
    alpha = complex(v["alpha_re"], v["alpha_im"])
    t = cfg.t_grid()
    mean_n = np.array([carrier_pfunc.mean_excitation(p, alpha, ti) for ti in t])
    # the carrier flips the spin at 2 pi omega_hz regardless of the motion
    area = 2 * math.pi * v["omega_hz"] * t
    psi0 = FockSpinVector.basis(0, 0, SpinLabel.DOWN)
    sz = np.array([expect_sigma_z(apply_carrier(psi0, PulseParams(a, v["phi"])))
                   for a in area])
    res.series["carrier"] = TimeSeries.from_sigma_z(t, sz, mean_n=mean_n)


def _run_carrier_grid(cfg, res):
    v = cfg.values
    p = carrier_pfunc.CarrierParams(v["gamma"], v["nu"], v["nbar"])
    alpha = complex(v["alpha_re"], v["alpha_im"])
    grid = carrier_pfunc.GridSpec.default_for(alpha, v["nbar"], v["grid_n"])
    for gt in cfg.gamma_t_values():
        t = gt / v["gamma"] if v["gamma"] > 0 else gt
        res.grids[f"gt{output.fmt(gt)}"] = carrier_pfunc.pgrid(p, alpha, t, grid)


def _run_heuristic(cfg, res):
    v = cfg.values
    hp = heuristic_fit.HeuristicParams.fock(v["n0"], _rabi(v), v["gamma0"], v["exponent"])
    res.series["heuristic"] = heuristic_fit.heuristic_series(hp, cfg.t_grid())


def gas_system(v):
    names = _SYSTEM + tuple(k for k in _QUANTIZED if k in v)
    return coupling_estimates.GasIonSystem(**{k: v[k] for k in names})


def _run_coupling_sweep(cfg, res):
    v = cfg.values
    sys = gas_system(v)
    disp = coupling_estimates.DispersionLaw(v["disp_amplitude"], v["disp_exponent"])
    if not 0 < v["k_min"] < v["k_max"] or v["k_points"] < 2:
        raise ConfigError("need 0 < k_min < k_max and k_points >= 2", "k_min")
    ks = np.geomspace(v["k_min"], v["k_max"], v["k_points"])
    vk = np.array([coupling_estimates.coupling_vk(k, sys, disp) for k in ks])
    res.tables["vk"] = ("k,vk", np.column_stack([ks, vk]))
    res.lines += [f"eta_k(k_max)={output.fmt(coupling_estimates.eta_k(ks[-1], sys))}",
                  f"vk_max={output.fmt(vk.max())}"]


def _run_langevin(cfg, res):
    v = cfg.values
    rates = coupling_estimates.langevin_rates(gas_system(v))
    res.lines += [
        f"impact_param_m={output.fmt(rates.impact_param)}",
        f"rate_const_m3_s={output.fmt(rates.rate_const)}",
        f"reaction_rate_s={output.fmt(rates.reaction_rate)}",
        f"reaction_rate_closed_form_s={output.fmt(rates.reaction_rate_closed_form)}",
        f"potential_J_at_r={output.fmt(coupling_estimates.polarization_potential(gas_system(v), v['r']))}",
    ]


def _run_pulse_demo(cfg, res):
    v = cfg.values
    t = cfg.t_grid()
    n0 = v["n0"]
    spin = SpinLabel.DOWN if v["spin"] == "down" else SpinLabel.UP
    g = v["eta_l"] * 2 * math.pi * v["omega_hz"]
    if v["pulse"] == "carrier":
        apply, rate = apply_carrier, 2 * math.pi * v["omega_hz"]
    else:
        apply, rate = (apply_jc if v["pulse"] == "jc" else apply_ajc), g
    n_max = v["n_max"] if v["n_max"] is not None else n0 + 2
    psi0 = FockSpinVector.basis(n_max, n0, spin)
    states = [apply(psi0, PulseParams(rate * ti, v["phi"])) for ti in t]
    sz = np.array([expect_sigma_z(s) for s in states])
    nn = np.array([expect_number(s) for s in states])
    res.series[v["pulse"]] = TimeSeries.from_sigma_z(t, sz, mean_n=nn)


_RUNNERS = {
    "ajc": _run_ajc, "ajc_oracle": _run_ajc_oracle, "carrier": _run_carrier,
    "carrier_grid": _run_carrier_grid, "heuristic": _run_heuristic,
    "coupling_sweep": _run_coupling_sweep, "langevin": _run_langevin,
    "pulse_demo": _run_pulse_demo,
}


def compute(cfg):
    """Run the physics of a scenario without touching the filesystem."""
    res = ScenarioResult(cfg)
    try:
        _RUNNERS[cfg.mode](cfg, res)
    except DomainError as exc:
        raise ConfigError(f"{cfg.mode}: {exc}") from exc
    return res


def _write(path, text, res):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    res.files.append(path)


def run_scenario(cfg):
    """Run a scenario and write its CSV/SVG artifacts next to ``cfg.output``."""
    res = compute(cfg)
    stem = cfg.output
    parent = os.path.dirname(stem)
    if parent:
        os.makedirs(parent, exist_ok=True)
    header = cfg.header()
    want_csv = cfg.format in ("csv", "both")
    want_svg = cfg.format in ("svg", "both")

    names = list(res.series)
    for i, name in enumerate(names):
        if want_csv:
            suffix = "" if i == 0 else f"_{name}"
            _write(f"{stem}{suffix}.csv", output.timeseries_csv(res.series[name], header), res)
    if want_svg and names:
        points = ()
        if "overlay" in cfg.extra:
            x, y = output.read_two_column(cfg.extra["overlay"])
            points = [("data", x, y)]
        svg = output.svg_series([res.series[n] for n in names], labels=names,
                                title=f"{cfg.mode}: {os.path.basename(stem)}", points=points)
        _write(f"{stem}.svg", svg, res)

    for key, (re, im, vals) in res.grids.items():
        if want_csv:
            _write(f"{stem}_{key}.csv", output.grid_csv(re, im, vals, header), res)
        if want_svg:
            _write(f"{stem}_{key}.svg",
                   output.svg_grid(re, im, vals, title=f"P(gamma), Gamma t = {key[2:]}"), res)

    for key, (columns, table) in res.tables.items():
        if want_csv:
            body = "\n".join(header + [columns]
                             + [",".join(output.fmt(x) for x in row) for row in table])
            _write(f"{stem}_{key}.csv", body + "\n", res)
        if want_svg:
            svg = output.svg_lines([(key, table[:, 0], table[:, 1])], xlabel="k (1/m)",
                                   ylabel="V_k (rad/s)", x_scale=1.0)
            _write(f"{stem}_{key}.svg", svg, res)

    if res.lines:
        _write(f"{stem}.txt", "\n".join(header + res.lines) + "\n", res)
    return res
