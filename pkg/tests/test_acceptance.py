"""Acceptance criteria for the package, one test per criterion.

Each test records a one-line PASS/FAIL verdict with the measured figure of
merit; the verdicts are printed in the pytest terminal summary. Running the
file directly (``python tests/test_acceptance.py``) prints the same lines.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest
import scipy.sparse as sparse
from scipy.integrate import quad
from scipy.sparse.linalg import expm_multiply

from iondecay import carrier_pfunc as cp
from iondecay import coupling_estimates as ce
from iondecay import scenarios
from iondecay.ajc_hierarchy import HierarchyParams, hierarchy_rhs, integrate
from iondecay.heuristic_fit import HeuristicParams, envelopes, p_down_heuristic
from iondecay.lindblad_oracle import (
    OracleMode, OracleParams, build_generator, evolve, hierarchy_moments,
)
from iondecay.states import DensityMatrix, FockSpinVector, SpinLabel, thermal_state

FIG3 = dict(eta_l=0.202, omega_hz=475e3, gamma_over_g=6.0e-3, nbar=1.0)

VERDICTS = {}


def record(number, ok, detail):
    VERDICTS[number] = f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {detail}"
    assert ok, VERDICTS[number]


def vacuum_down(n_max):
    return FockSpinVector.basis(n_max, 0, SpinLabel.DOWN).to_density_matrix()


def test_1_undamped_rabi_limit():
    start = time.perf_counter()
    gt = np.linspace(0.0, 20.0, 2001)
    errs = []
    for n0 in (0, 1):
        p = HierarchyParams(g=1.0, gamma=0.0, nbar=0.0, truncation=4, n0=n0)
        pd = integrate(p, gt).series.p_down
        errs.append(np.max(np.abs(pd - np.cos(math.sqrt(n0 + 1) * gt) ** 2)))
    elapsed = time.perf_counter() - start
    record(1, max(errs) <= 1e-6 and elapsed < 1.0,
           f"max |P_down - cos^2| = {errs[0]:.2e} (n0=0), {errs[1]:.2e} (n0=1); "
           f"{elapsed:.2f} s")


def test_2_oracle_equivalence():
    start = time.perf_counter()
    t = np.linspace(0.0, 120e-6, 1201)
    hp = HierarchyParams.from_experiment(**FIG3, truncation=6)
    assert hp.g / (2 * math.pi) == pytest.approx(95.95e3, rel=1e-12)
    hier = integrate(hp, t).series.p_down
    op = OracleParams(g=hp.g, gamma=hp.gamma, nbar=hp.nbar, n_max=14)
    orc = evolve(op, vacuum_down(op.n_max), t).series.p_down
    err = np.max(np.abs(hier - orc))
    elapsed = time.perf_counter() - start
    record(2, err <= 1e-3 and elapsed < 30.0,
           f"max |hierarchy - oracle| = {err:.2e} over 120 us (oracle n_max "
           f"{op.requested_n_max} raised to {op.n_max} by the tail rule); {elapsed:.2f} s")


def test_3_asymmetric_decay():
    cfg = scenarios.preset_config("fig3")
    t = cfg.t_grid()
    hp = HierarchyParams.from_experiment(**FIG3, truncation=cfg.values["truncation"])
    env = envelopes(t, integrate(hp, t).series.p_down)
    hier_asym = env.asymmetry(60e-6)
    up, low = env.decay_rates()
    heur_asym = []
    for n0 in (0, 1):
        p = HeuristicParams.fock(n0, hp.g)
        e = envelopes(t, p_down_heuristic(p, t), func=lambda x, p=p: p_down_heuristic(p, x))
        heur_asym.append(abs(e.asymmetry(60e-6)))
    ok = abs(hier_asym) > 0.01 and max(heur_asym) <= 1e-6
    record(3, ok,
           f"hierarchy asymmetry at 60 us = {hier_asym:+.3f} (envelope rates {up:.0f} vs "
           f"{low:.0f} 1/s); heuristic |asymmetry| <= {max(heur_asym):.1e}")


def test_4_zero_temperature_closure():
    start = time.perf_counter()
    gt = np.linspace(0.0, 30.0, 301)
    runs = [integrate(HierarchyParams(g=1.0, gamma=0.05, nbar=0.0, truncation=n, n0=0), gt)
            for n in (1, 6)]
    err = np.max(np.abs(runs[0].series.p_down - runs[1].series.p_down))
    elapsed = time.perf_counter() - start
    record(4, err <= 1e-10 and elapsed < 1.0, f"max |N=1 - N=6| = {err:.1e}; {elapsed:.2f} s")


def test_5_vacuum_heating():
    start = time.perf_counter()
    gamma, nbar = 1.0, 1.0
    gt = np.linspace(0.0, 3.0, 61)
    p = cp.CarrierParams(gamma, nu=5.0, nbar=nbar)
    closed = np.array([cp.mean_excitation(p, 0.0, x) for x in gt])
    formula_err = np.max(np.abs(closed - nbar * (1 - np.exp(-gamma * gt))))
    op = OracleParams(g=0.0, gamma=gamma, nbar=nbar, n_max=24, mode=OracleMode.CARRIER_FREE)
    orc = evolve(op, vacuum_down(op.n_max), gt).series.mean_n
    oracle_err = np.max(np.abs(closed - orc))
    asymptote = cp.mean_excitation(p, 0.0, 50.0)
    elapsed = time.perf_counter() - start
    ok = formula_err <= 1e-12 and oracle_err <= 1e-4 and abs(asymptote - 1.0) <= 1e-12 \
        and elapsed < 5.0
    record(5, ok, f"closed form vs oracle {oracle_err:.1e}; <n>(Gamma t=50) = {asymptote:.12f}; "
                  f"{elapsed:.2f} s")


def test_6_fig2_grids():
    start = time.perf_counter()
    cfg = scenarios.preset_config("fig2")
    res = scenarios.compute(cfg)
    p = cp.CarrierParams(cfg.values["gamma"], cfg.values["nu"], cfg.values["nbar"])
    alpha = complex(cfg.values["alpha_re"], cfg.values["alpha_im"])
    worst_mean = worst_var = 0.0
    for gt in (0.2, 0.9):
        re, im, vals = res.grids[f"gt{gt}"]
        _, mean, var = cp.grid_moments(re, im, vals)
        t = gt / p.gamma
        worst_mean = max(worst_mean, abs(mean - cp.propagator_u(p, t) * alpha))
        worst_var = max(worst_var, abs(var - cp.dispersion_D(p, t)))
    elapsed = time.perf_counter() - start
    record(6, worst_mean <= 1e-3 and worst_var <= 1e-3 and elapsed < 5.0,
           f"grid mean error {worst_mean:.1e}, variance error {worst_var:.1e}; {elapsed:.2f} s")


def test_7_moment_shadow():
    hp = HierarchyParams.from_experiment(**FIG3, truncation=4)
    # n_max=22 keeps Fock-truncation effects on the n <= 3 moment flow below 1e-8
    op = OracleParams(g=hp.g, gamma=hp.gamma, nbar=hp.nbar, phi=0.3, n_max=22)
    gen = sparse.csr_matrix(build_generator(op).superoperator())
    dim = 2 * (op.n_max + 1)
    h = 1e-2 / hp.g
    times = np.linspace(0.0, 120e-6, 21)
    rho = vacuum_down(op.n_max).elements.ravel()
    keep = np.r_[0:4, 5:9, 10:13]     # P_0..3, Q_0..3, R_1..3 in packed order
    worst = 0.0
    for t_prev, t_now in zip(times[:-1], times[1:]):
        rho = expm_multiply(gen * (t_now - t_prev), rho)
        shifted = [hierarchy_moments(DensityMatrix(op.n_max, expm_multiply(gen * k * h, rho)
                                                   .reshape(dim, dim)), 4, op.phi).pack()
                   for k in (-2, -1, 1, 2)]
        fd = (shifted[0] - 8 * shifted[1] + 8 * shifted[2] - shifted[3]) / (12 * h)
        here = hierarchy_moments(DensityMatrix(op.n_max, rho.reshape(dim, dim)), 4, op.phi)
        rhs = hierarchy_rhs(hp, here).pack()
        worst = max(worst, np.max(np.abs(fd[keep] - rhs[keep])) / hp.g)
    record(7, worst <= 1e-6,
           f"max |finite difference - hierarchy_rhs| / g = {worst:.1e} at 20 times, n <= 3")


def _k1_quadrature(x):
    upper = math.acosh(1.0 + 750.0 / x)
    val, _ = quad(lambda s: math.exp(-x * (math.cosh(s) - 1.0)) * math.cosh(s), 0.0, upper,
                  epsabs=0.0, epsrel=1e-13, limit=400)
    return val * math.exp(-x)


def test_8_special_functions():
    xs = np.geomspace(1e-6, 700.0, 200)
    k1_err = max(abs(ce.bessel_k1(x) / _k1_quadrature(x) - 1.0) for x in xs)
    sys_ = ce.GasIonSystem(chi=1.0053e-29, q=1.602176634e-19, rho_number=3e10,
                           reduced_mass=2.9e-27, rel_velocity=1.5e3, ion_mass=1.4965e-26,
                           trap_freq=7.037e7, rho_mass=1e-12, z=1e-6, S=1e-10)
    disp = ce.DispersionLaw(amplitude=1e-3)
    ratio = ce.coupling_vk(1e-6 / sys_.z, sys_, disp) / ce.coupling_vk(1.0 / sys_.z, sys_, disp)
    rates = ce.langevin_rates(sys_)
    ident = abs(rates.reaction_rate / rates.reaction_rate_closed_form - 1.0)
    record(8, k1_err <= 1e-10 and ratio < 1e-5 and ident <= 1e-12,
           f"K1 max rel error {k1_err:.1e}; V_k(kz=1e-6)/V_k(kz=1) = {ratio:.1e}; "
           f"Langevin identity {ident:.1e}")


def test_9_determinism(tmp_path):
    digests = []
    for run in ("a", "b"):
        out = tmp_path / run
        subprocess.run([sys.executable, "-m", "iondecay", "preset", "fig3", "--out", str(out)],
                       check=True, capture_output=True)
        digests.append((out / "fig3.csv").read_bytes())
    record(9, digests[0] == digests[1] and len(digests[0]) > 0,
           f"two `preset fig3` runs, {len(digests[0])} bytes each, identical="
           f"{digests[0] == digests[1]}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
