"""Truncated c-number moment hierarchy for the damped blue-sideband (anti-JC) drive.

Variables, for ``n = 0..N``::

    P_n = <(a^dag)^n a^n>            P_0 = 1
    Q_n = <(a^dag)^n a^n sigma_z>    Q_0 = <sigma_z>
    R_n = <sigma_+ (a^dag)^n a^(n-1) e^(-i phi) + h.c.>,   n = 1..N

obey the closed linear system::

    dP_n/dt = n g R_n - n G P_n + n^2 G nbar P_(n-1)
    dQ_n/dt = n g R_n + 2 g R_(n+1) - n G Q_n + n^2 G nbar Q_(n-1)
    dR_n/dt = -2 g Q_n + n g P_(n-1) - n g Q_(n-1) - (n - 1/2) G R_n
              + n (n-1) G nbar R_(n-1)

with the closure ``R_(N+1) = 0``. ``G`` is the reservoir damping rate and
``nbar`` its thermal occupation. The laser phase drops out of every
equation.

The closure is not exact once ``G * nbar > 0``: the truncated system then
has a few weakly growing modes living in the top moments, and the growth
rate increases with ``N``. For weak damping over a few tens of Rabi
periods they stay negligible. For strong heating or long windows, compare
two truncations, or use :meth:`HierarchyState.check` to flag moments that
have become unphysical.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _ode
from .errors import DomainError, TruncationTooSmall
from .states import TimeSeries

RTOL = 1e-9
ATOL = 1e-12
H_MIN = 1e-18


@dataclass(frozen=True)
class HierarchyParams:
    g: float
    gamma: float
    nbar: float
    truncation: int = 4
    n0: int = 0

    def __post_init__(self):
        for name in ("g", "gamma", "nbar"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be finite and >= 0, got {value}")
        if self.truncation < 1:
            raise DomainError("truncation must be >= 1")
        if self.n0 < 0:
            raise DomainError("n0 must be >= 0")

    @classmethod
    def from_experiment(cls, eta_l, omega_hz, gamma_over_g, nbar, truncation=4, n0=0):
        """Sideband coupling ``g = eta_l * 2 pi omega_hz`` and ``Gamma = ratio * g``."""
        g = eta_l * 2 * math.pi * omega_hz
        return cls(g=g, gamma=gamma_over_g * g, nbar=nbar, truncation=truncation, n0=n0)


@dataclass(frozen=True)
class HierarchyState:
    """Moments at time ``t``; ``R[i]`` holds ``R_(i+1)``."""

    t: float
    P: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    @property
    def truncation(self):
        return self.P.size - 1

    def pack(self):
        return np.concatenate([self.P, self.Q, self.R])

    @classmethod
    def unpack(cls, t, y, truncation):
        n1 = truncation + 1
        return cls(float(t), y[:n1].copy(), y[n1:2 * n1].copy(), y[2 * n1:].copy())

    def check(self, tol=1e-8):
        if self.P[0] != 1.0:
            raise ValueError(f"P_0 = {self.P[0]!r} != 1")
        if np.any(self.P < -tol):
            raise ValueError("negative factorial moment")
        if np.any(np.abs(self.Q) > self.P + tol):
            raise ValueError("|Q_n| exceeds P_n")

    @property
    def sigma_z(self):
        return float(self.Q[0])

    @property
    def mean_n(self):
        return float(self.P[1])

    @property
    def p_down(self):
        return 0.5 * (1.0 - float(self.Q[0]))


def init_from_fock(p):
    """Moments of ``|n0, down>``: falling factorials ``n0!/(n0-n)!``, ``Q = -P``."""
    N = p.truncation
    if p.n0 > N - 1:
        raise TruncationTooSmall(f"truncation {N} cannot hold n0={p.n0} (need >= n0 + 1)")
    P = np.zeros(N + 1)
    for n in range(min(p.n0, N) + 1):
        P[n] = math.perm(p.n0, n)
    return HierarchyState(0.0, P, -P.copy(), np.zeros(N))


def _rhs_arrays(g, gamma, nbar, P, Q, R):
    N = P.size - 1
    n = np.arange(N + 1, dtype=float)
    # R_ext[n] = R_n for n = 1..N; R_ext[0] unused, R_ext[N+1] is the closure
    R_ext = np.zeros(N + 2)
    R_ext[1:N + 1] = R
    P_prev = np.concatenate(([0.0], P[:-1]))
    Q_prev = np.concatenate(([0.0], Q[:-1]))
    heat = gamma * nbar

    dP = n * g * R_ext[:-1] - n * gamma * P + n * n * heat * P_prev
    dQ = n * g * R_ext[:-1] + 2 * g * R_ext[1:] - n * gamma * Q + n * n * heat * Q_prev
    m = n[1:]
    dR = (-2 * g * Q[1:] + m * g * P[:-1] - m * g * Q[:-1]
          - (m - 0.5) * gamma * R + m * (m - 1) * heat * R_ext[:-2][:N])
    return dP, dQ, dR


def generator_matrix(p, truncation=None):
    """Matrix ``M`` with ``d/dt pack(state) = M @ pack(state)``."""
    N = p.truncation if truncation is None else truncation
    size = 3 * N + 2
    n1 = N + 1
    M = np.empty((size, size))
    for j, e in enumerate(np.eye(size)):
        dP, dQ, dR = _rhs_arrays(p.g, p.gamma, p.nbar, e[:n1], e[n1:2 * n1], e[2 * n1:])
        M[:, j] = np.concatenate([dP, dQ, dR])
    return M


def hierarchy_rhs(p, s):
    """Time derivative of every hierarchy variable, as a :class:`HierarchyState`."""
    dP, dQ, dR = _rhs_arrays(p.g, p.gamma, p.nbar, s.P, s.Q, s.R)
    return HierarchyState(s.t, dP, dQ, dR)


def d_sigma_z(p, s):
    """``d<sigma_z>/dt = 2 g R_1``."""
    return 2 * p.g * float(s.R[0])


def d_mean_n(p, s):
    """``d<a^dag a>/dt = g R_1 - Gamma <a^dag a> + Gamma nbar``."""
    return p.g * float(s.R[0]) - p.gamma * float(s.P[1]) + p.gamma * p.nbar


@dataclass(frozen=True)
class HierarchyRun:
    series: TimeSeries
    P: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    def state(self, i):
        return HierarchyState(float(self.series.times[i]), self.P[i], self.Q[i], self.R[i])


def integrate(p, t_grid, initial=None, rtol=RTOL, atol=ATOL):
    """Integrate the hierarchy from ``|n0, down>`` (or ``initial``) over ``t_grid``.

    ``t_grid`` must start at 0 and increase strictly.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0 or t_grid[0] != 0.0:
        raise DomainError("t_grid must start at 0")
    s0 = init_from_fock(p) if initial is None else initial
    N = s0.truncation
    n1 = N + 1
    M = generator_matrix(p, N)

    def rhs(t, y):
        return M @ y

    ys = _ode.integrate(rhs, s0.pack(), t_grid, rtol=rtol, atol=atol, h_min=H_MIN)
    P, Q, R = ys[:, :n1], ys[:, n1:2 * n1], ys[:, 2 * n1:]
    series = TimeSeries.from_sigma_z(t_grid, Q[:, 0], mean_n=P[:, 1])
    return HierarchyRun(series, P, Q, R)
