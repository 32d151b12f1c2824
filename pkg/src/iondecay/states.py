"""Basis conventions, state containers and observables.

States live on the truncated product space Fock(0..n_max) x {down, up}.
The flat index of ``|n, s>`` is ``2*n + s`` with ``s = 0`` for down and
``s = 1`` for up, so the Fock number is the slow axis.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from scipy.special import gammaln

_IMAG_TOL = 1e-10
_CLAMP_TOL = 1e-9


class SpinLabel(IntEnum):
    DOWN = 0
    UP = 1

    @property
    def sigma_z(self):
        return -1 if self is SpinLabel.DOWN else 1


def flatten(n, s):
    return 2 * int(n) + int(s)


def unflatten(index):
    n, s = divmod(int(index), 2)
    return n, SpinLabel(s)


def dimension(n_max):
    return 2 * (n_max + 1)


@dataclass(frozen=True)
class FockSpinVector:
    """Pure state with amplitudes ``amplitudes[2n + s]``."""

    n_max: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (dimension(self.n_max),):
            raise ValueError(
                f"expected {dimension(self.n_max)} amplitudes, got shape {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n_max, n, s):
        if not 0 <= n <= n_max:
            raise ValueError(f"Fock index {n} outside 0..{n_max}")
        amps = np.zeros(dimension(n_max), dtype=complex)
        amps[flatten(n, s)] = 1.0
        return cls(n_max, amps)

    @classmethod
    def from_components(cls, n_max, components):
        """Build a normalized state from ``{(n, s): amplitude}``."""
        amps = np.zeros(dimension(n_max), dtype=complex)
        for (n, s), c in components.items():
            amps[flatten(n, s)] += c
        return cls(n_max, amps / np.linalg.norm(amps))

    def amplitude(self, n, s):
        return self.amplitudes[flatten(n, s)]

    def by_level(self):
        """Amplitudes reshaped to ``(n_max + 1, 2)``: rows are Fock levels."""
        return self.amplitudes.reshape(self.n_max + 1, 2)

    def norm_squared(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def to_density_matrix(self):
        return DensityMatrix(self.n_max, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    n_max: int
    elements: np.ndarray

    def __post_init__(self):
        rho = np.array(self.elements, dtype=complex)
        dim = dimension(self.n_max)
        if rho.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
        rho.setflags(write=False)
        object.__setattr__(self, "elements", rho)

    def trace(self):
        return complex(np.trace(self.elements))

    def hermiticity_error(self):
        return float(np.max(np.abs(self.elements - self.elements.conj().T)))

    def min_eigenvalue(self):
        herm = 0.5 * (self.elements + self.elements.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def fock_populations(self):
        """Diagonal populations summed over spin, indexed by Fock number."""
        return np.real(np.diag(self.elements)).reshape(self.n_max + 1, 2).sum(axis=1)

    def check(self, herm_tol=1e-12, trace_tol=1e-9, eig_tol=1e-8):
        """Raise ``ValueError`` if the matrix is not a valid density matrix."""
        if self.hermiticity_error() > herm_tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(self.trace() - 1.0) > trace_tol:
            raise ValueError(f"density matrix trace {self.trace()} != 1")
        if self.min_eigenvalue() < -eig_tol:
            raise ValueError("density matrix has a negative eigenvalue")


@dataclass(frozen=True)
class TimeSeries:
    """Sampled observables; ``mean_n`` may be all-NaN when not modelled."""

    times: np.ndarray
    p_down: np.ndarray
    sigma_z: np.ndarray
    mean_n: np.ndarray

    def __post_init__(self):
        arrays = [np.asarray(getattr(self, f), dtype=float)
                  for f in ("times", "p_down", "sigma_z", "mean_n")]
        if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 1:
            raise ValueError("TimeSeries arrays must be 1-D and of equal length")
        for name, arr in zip(("times", "p_down", "sigma_z", "mean_n"), arrays):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_sigma_z(cls, times, sigma_z, mean_n=None):
        sigma_z = np.asarray(sigma_z, dtype=float)
        if mean_n is None:
            mean_n = np.full_like(sigma_z, np.nan)
        return cls(np.asarray(times, dtype=float), _p_down_from_sz(sigma_z),
                   sigma_z, np.asarray(mean_n, dtype=float))

    def __len__(self):
        return self.times.size


def _real(value):
    if abs(value.imag) > _IMAG_TOL * max(1.0, abs(value.real)):
        raise ValueError(f"observable has imaginary residue {value.imag:.3e}")
    return float(value.real)


def _p_down_from_sz(sz):
    p = 0.5 * (1.0 - np.asarray(sz, dtype=float))
    if np.any(p < -_CLAMP_TOL) or np.any(p > 1 + _CLAMP_TOL):
        raise ValueError("p_down outside [0, 1] beyond clamp tolerance")
    return np.clip(p, 0.0, 1.0)


def sigma_z_diagonal(n_max):
    return np.tile([-1.0, 1.0], n_max + 1)


def number_diagonal(n_max):
    return np.repeat(np.arange(n_max + 1, dtype=float), 2)


def expect_sigma_z(state):
    """``<sigma_z>`` for a :class:`FockSpinVector` or :class:`DensityMatrix`."""
    diag = sigma_z_diagonal(state.n_max)
    if isinstance(state, FockSpinVector):
        return float(np.sum(diag * np.abs(state.amplitudes) ** 2))
    return _real(np.sum(diag * np.diag(state.elements)))


def expect_number(state):
    """``<a^dagger a>`` for a :class:`FockSpinVector` or :class:`DensityMatrix`."""
    diag = number_diagonal(state.n_max)
    if isinstance(state, FockSpinVector):
        return float(np.sum(diag * np.abs(state.amplitudes) ** 2))
    return _real(np.sum(diag * np.diag(state.elements)))


def p_down(state):
    """Ground-state (fluorescence) probability ``(1 - <sigma_z>)/2``."""
    return float(_p_down_from_sz(expect_sigma_z(state)))


def p_up(state):
    return 1.0 - p_down(state)


def thermal_populations(nbar, n_max):
    """Bose-Einstein populations ``nbar^n / (nbar+1)^(n+1)`` for ``n <= n_max``."""
    n = np.arange(n_max + 1)
    if nbar == 0:
        return (n == 0).astype(float)
    return (nbar / (nbar + 1.0)) ** n / (nbar + 1.0)


def thermal_tail_mass(nbar, n_max):
    """Thermal probability carried by levels above ``n_max``."""
    if nbar == 0:
        return 0.0
    return (nbar / (nbar + 1.0)) ** (n_max + 1)


def coherent_amplitudes(alpha, n_max):
    """Fock amplitudes of ``|alpha>`` on levels ``0..n_max`` (not renormalized)."""
    n = np.arange(n_max + 1)
    if alpha == 0:
        return (n == 0).astype(complex)
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def motional_product(motional_rho, spin):
    """Density matrix ``motional_rho (x) |spin><spin|`` in the flat ordering."""
    motional_rho = np.asarray(motional_rho, dtype=complex)
    n_max = motional_rho.shape[0] - 1
    proj = np.zeros((2, 2))
    proj[int(spin), int(spin)] = 1.0
    return DensityMatrix(n_max, np.kron(motional_rho, proj))


def thermal_state(nbar, n_max, spin=SpinLabel.DOWN):
    pops = thermal_populations(nbar, n_max)
    return motional_product(np.diag(pops / pops.sum()), spin)


def coherent_state(alpha, n_max, spin=SpinLabel.DOWN):
    c = coherent_amplitudes(alpha, n_max)
    c = c / np.linalg.norm(c)
    return motional_product(np.outer(c, c.conj()), spin)
