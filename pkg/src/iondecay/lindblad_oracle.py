"""Brute-force density-matrix evolution used to cross-check the closed forms.

The ion (spin + truncated oscillator) evolves under

    d rho/dt = -i [H, rho] + Gamma (nbar + 1) D[a] rho + Gamma nbar D[a^dag] rho

with ``D[L] rho = L rho L^dag - {L^dag L, rho}/2`` and, in ``ajc_drive`` mode,
``H = i g (sigma_+ a^dag e^(-i phi) - sigma_- a e^(i phi))``. In
``carrier_free`` mode ``H = 0``: the carrier drive never touches the motion,
and the trap rotation is removed by working in the frame rotating at ``nu``.
The dissipator is the thermal one whose normally ordered moments relax as
``d<a^dag^m a^n> = -(m+n) Gamma/2 <.> + m n Gamma nbar <a^dag^(m-1) a^(n-1)>``.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _ode
from .ajc_hierarchy import HierarchyState
from .errors import DomainError, TailLeakage
from .states import DensityMatrix, TimeSeries, dimension, thermal_tail_mass

RTOL = 1e-9
ATOL = 1e-12
MIN_N_MAX = 4
MAX_THERMAL_TAIL = 1e-5
MAX_INITIAL_TAIL = 1e-8
MAX_RUN_TAIL = 1e-6
MIN_EIGENVALUE = -1e-8


class OracleMode(str, enum.Enum):
    AJC_DRIVE = "ajc_drive"
    CARRIER_FREE = "carrier_free"


@dataclass(frozen=True)
class OracleParams:
    """Oracle settings. ``n_max`` is raised until the thermal tail check passes."""

    g: float
    gamma: float
    nbar: float
    phi: float = 0.0
    n_max: int = 12
    mode: OracleMode = OracleMode.AJC_DRIVE
    requested_n_max: int = field(init=False)

    def __post_init__(self):
        for name in ("g", "gamma", "nbar"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be finite and >= 0, got {value}")
        object.__setattr__(self, "mode", OracleMode(self.mode))
        object.__setattr__(self, "requested_n_max", int(self.n_max))
        n_max = max(int(self.n_max), MIN_N_MAX)
        while thermal_tail_mass(self.nbar, n_max) > MAX_THERMAL_TAIL:
            n_max += 1
        object.__setattr__(self, "n_max", n_max)


def ladder_operators(n_max):
    """``(a, sigma_+, sigma_z)`` on the flat ``2n + s`` basis."""
    a_fock = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1)
    sigma_plus = np.array([[0.0, 0.0], [1.0, 0.0]])
    sigma_z = np.diag([-1.0, 1.0])
    eye_f, eye_s = np.eye(n_max + 1), np.eye(2)
    return (np.kron(a_fock, eye_s), np.kron(eye_f, sigma_plus), np.kron(eye_f, sigma_z))


def ajc_hamiltonian(g, phi, n_max):
    a, sp, _ = ladder_operators(n_max)
    term = sp @ a.T * np.exp(-1j * phi)
    return 1j * g * (term - term.conj().T)


@dataclass(frozen=True)
class Generator:
    """Lindblad generator in a form cheap to apply to a matrix."""

    n_max: int
    hamiltonian: np.ndarray
    jumps: tuple
    rates: tuple

    def __post_init__(self):
        h_eff = self.hamiltonian.astype(complex)
        for L, c in zip(self.jumps, self.rates):
            h_eff = h_eff - 0.5j * c * (L.conj().T @ L)
        object.__setattr__(self, "_h_eff", h_eff)

    def apply(self, rho):
        h_eff = self._h_eff
        out = -1j * (h_eff @ rho - rho @ h_eff.conj().T)
        for L, c in zip(self.jumps, self.rates):
            if c:
                out += c * (L @ rho @ L.conj().T)
        return out

    def superoperator(self):
        """Dense matrix acting on row-major ``rho.ravel()``."""
        dim = dimension(self.n_max)
        eye = np.eye(dim)
        h_eff = self._h_eff
        sup = -1j * (np.kron(h_eff, eye) - np.kron(eye, h_eff.conj()))
        for L, c in zip(self.jumps, self.rates):
            if c:
                sup += c * np.kron(L, L.conj())
        return sup


def build_generator(p):
    a, _, _ = ladder_operators(p.n_max)
    if p.mode is OracleMode.AJC_DRIVE:
        h = ajc_hamiltonian(p.g, p.phi, p.n_max)
    else:
        h = np.zeros((dimension(p.n_max),) * 2, dtype=complex)
    rates = (p.gamma * (p.nbar + 1.0), p.gamma * p.nbar)
    return Generator(p.n_max, h, (a, a.T.copy()), rates)


def embed(rho, n_max):
    """Pad a density matrix with empty Fock levels up to ``n_max``."""
    if rho.n_max == n_max:
        return rho
    if rho.n_max > n_max:
        raise DomainError(f"state has n_max={rho.n_max} > oracle n_max={n_max}")
    big = np.zeros((dimension(n_max),) * 2, dtype=complex)
    d = dimension(rho.n_max)
    big[:d, :d] = rho.elements
    return DensityMatrix(n_max, big)


def _top_two_population(rho_elements, n_max):
    pops = np.real(np.diag(rho_elements)).reshape(n_max + 1, 2).sum(axis=1)
    return float(pops[-2:].sum())


@dataclass(frozen=True)
class OracleRun:
    series: TimeSeries
    rhos: np.ndarray
    n_max: int

    def state(self, i):
        return DensityMatrix(self.n_max, self.rhos[i])


def evolve(p, rho0, t_grid, rtol=RTOL, atol=ATOL):
    """Propagate ``rho0`` and sample observables on ``t_grid``."""
    rho0 = embed(rho0, p.n_max)
    rho0.check()
    if _top_two_population(rho0.elements, p.n_max) > MAX_INITIAL_TAIL:
        raise TailLeakage("initial state reaches the top of the Fock truncation")
    gen = build_generator(p)
    dim = dimension(p.n_max)

    def rhs(t, y):
        return gen.apply(y.reshape(dim, dim)).ravel()

    ys = _ode.integrate(rhs, rho0.elements.ravel(), t_grid, rtol=rtol, atol=atol)
    rhos = ys.reshape(-1, dim, dim)

    sz_diag = np.tile([-1.0, 1.0], p.n_max + 1)
    n_diag = np.repeat(np.arange(p.n_max + 1, dtype=float), 2)
    diags = np.real(np.diagonal(rhos, axis1=1, axis2=2))
    for i, rho in enumerate(rhos):
        if _top_two_population(rho, p.n_max) > MAX_RUN_TAIL:
            raise TailLeakage(
                f"top Fock levels hold {_top_two_population(rho, p.n_max):.2e} "
                f"at t={t_grid[i]:.3e} s; raise n_max above {p.n_max}"
            )
        herm = 0.5 * (rho + rho.conj().T)
        if np.linalg.eigvalsh(herm)[0] < MIN_EIGENVALUE:
            raise TailLeakage(f"density matrix lost positivity at t={t_grid[i]:.3e} s")
    series = TimeSeries.from_sigma_z(t_grid, diags @ sz_diag, mean_n=diags @ n_diag)
    return OracleRun(series, rhos, p.n_max)


def moment_operators(n_max, n, phi=0.0):
    """Operators whose expectations are ``P_n``, ``Q_n`` and (for n >= 1) ``R_n``."""
    a, sp, sz = ladder_operators(n_max)
    ad = a.T
    ad_n = np.linalg.matrix_power(ad, n)
    a_n = np.linalg.matrix_power(a, n)
    P = ad_n @ a_n
    Q = P @ sz
    if n == 0:
        return P, Q, None
    half = sp @ ad_n @ np.linalg.matrix_power(a, n - 1) * np.exp(-1j * phi)
    return P, Q, half + half.conj().T


def hierarchy_moments(rho, truncation, phi=0.0, t=0.0):
    """Evaluate every hierarchy variable up to ``truncation`` on a density matrix."""
    elements = rho.elements if isinstance(rho, DensityMatrix) else np.asarray(rho)
    n_max = elements.shape[0] // 2 - 1
    P = np.empty(truncation + 1)
    Q = np.empty(truncation + 1)
    R = np.empty(truncation)
    for n in range(truncation + 1):
        op_p, op_q, op_r = moment_operators(n_max, n, phi)
        P[n] = np.real(np.trace(elements @ op_p))
        Q[n] = np.real(np.trace(elements @ op_q))
        if op_r is not None:
            R[n - 1] = np.real(np.trace(elements @ op_r))
    return HierarchyState(float(t), P, Q, R)
