"""Phenomenological damped-Rabi formula and envelope diagnostics.

    P_down(t) ~ 1/2 (1 + sum_n p_n cos(2 w t sqrt(n+1)) exp(-gamma_n t)),
    gamma_n = gamma_0 (n + 1)^0.7

This is the curve experimenters fit to sideband Rabi flops. Every term
decays symmetrically about 1/2, which is what the envelope helpers below
quantify when it is set against the moment hierarchy.

The formula is usually printed with the carrier Rabi frequency inside the
cosine, but the blue-sideband flop runs at ``2 g sqrt(n+1)`` with
``g = eta_L Omega``. ``rabi`` is therefore an explicit parameter; pass ``g``
to match the hierarchy's flop frequency.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError
from .states import TimeSeries

DEFAULT_EXPONENT = 0.7
GAMMA0_EXPERIMENT = 11.9e3  # 1/s


@dataclass(frozen=True)
class HeuristicParams:
    p_dist: np.ndarray
    rabi: float
    gamma0: float
    exponent: float = DEFAULT_EXPONENT

    def __post_init__(self):
        p = np.array(self.p_dist, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise DomainError("p_dist must be a nonempty 1-D array")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise DomainError("p_dist must be nonnegative and sum to 1")
        if self.gamma0 < 0:
            raise DomainError("gamma0 must be >= 0")
        p.setflags(write=False)
        object.__setattr__(self, "p_dist", p)

    @classmethod
    def fock(cls, n0, rabi, gamma0=GAMMA0_EXPERIMENT, exponent=DEFAULT_EXPONENT):
        p = np.zeros(n0 + 1)
        p[n0] = 1.0
        return cls(p, rabi, gamma0, exponent)


def gamma_n(p, n):
    if n < 0:
        raise DomainError("n must be >= 0")
    return p.gamma0 * (n + 1) ** p.exponent


def p_down_heuristic(p, t):
    """Evaluate the heuristic at scalar or array ``t`` (seconds)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise DomainError("t must be >= 0")
    n = np.arange(p.p_dist.size)
    rates = p.gamma0 * (n + 1.0) ** p.exponent
    phase = 2.0 * p.rabi * np.sqrt(n + 1.0)
    tt = t_arr[..., None]
    terms = p.p_dist * np.cos(phase * tt) * np.exp(-rates * tt)
    out = 0.5 * (1.0 + terms.sum(axis=-1))
    return float(out) if out.ndim == 0 else out


def heuristic_series(p, t_grid):
    t_grid = np.asarray(t_grid, dtype=float)
    sz = 1.0 - 2.0 * p_down_heuristic(p, t_grid)
    return TimeSeries.from_sigma_z(t_grid, sz)


# ---------------------------------------------------------------------------
# Envelopes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Envelopes:
    t_max: np.ndarray
    upper: np.ndarray
    t_min: np.ndarray
    lower: np.ndarray

    def upper_at(self, t):
        return 0.5 + _log_interp(t, self.t_max, self.upper - 0.5)

    def lower_at(self, t):
        return 0.5 - _log_interp(t, self.t_min, 0.5 - self.lower)

    def asymmetry(self, t):
        """Midline offset ``U(t) + L(t) - 1``; zero for a symmetric decay."""
        return self.upper_at(t) + self.lower_at(t) - 1.0

    def decay_rates(self):
        """Least-squares exponential rates of the upper and lower envelopes."""
        return (_fit_rate(self.t_max, self.upper - 0.5),
                _fit_rate(self.t_min, 0.5 - self.lower))


def _log_interp(t, ts, amps):
    if np.all(amps > 0):
        return np.exp(np.interp(t, ts, np.log(amps)))
    return np.interp(t, ts, amps)


def _fit_rate(ts, amps):
    mask = amps > 0
    slope = np.polyfit(ts[mask], np.log(amps[mask]), 1)[0]
    return -slope


def _refine(f, t_lo, t_hi, sign, tol):
    res = minimize_scalar(lambda x: -sign * f(x), bounds=(t_lo, t_hi),
                          method="bounded", options={"xatol": tol})
    return res.x, float(f(res.x))


def _parabola(t, y, i):
    # vertex of the parabola through three equally spaced samples
    h = t[i + 1] - t[i]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return t[i], y1
    offset = 0.5 * (y0 - y2) / denom
    return t[i] + offset * h, y1 - 0.25 * (y0 - y2) * offset


def envelopes(times, values, func=None):
    """Locate interior extrema of a sampled oscillation.

    With ``func`` given, each discrete extremum is refined on the exact
    function; otherwise a three-point parabola is used (uniform grids only).
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    inner = np.arange(1, y.size - 1)
    is_max = inner[(y[inner] > y[inner - 1]) & (y[inner] >= y[inner + 1])]
    is_min = inner[(y[inner] < y[inner - 1]) & (y[inner] <= y[inner + 1])]
    tol = 1e-9 * (t[-1] - t[0])

    def collect(indices, sign):
        pts = []
        for i in indices:
            if func is not None:
                pts.append(_refine(func, t[i - 1], t[i + 1], sign, tol))
            else:
                pts.append(_parabola(t, y, i))
        arr = np.array(pts, dtype=float).reshape(-1, 2)
        return arr[:, 0], arr[:, 1]

    t_max, upper = collect(is_max, +1)
    t_min, lower = collect(is_min, -1)
    return Envelopes(t_max, upper, t_min, lower)


def flop_period(rabi, n=0):
    return math.pi / (rabi * math.sqrt(n + 1.0))
