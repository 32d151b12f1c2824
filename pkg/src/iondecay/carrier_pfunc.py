"""Carrier-regime motional dynamics through the Gaussian conditional P function.

With the laser on the carrier the motion decouples from the spin and the
background gas acts as a thermal reservoir on the oscillator alone. The
representative term ``|alpha1><alpha2|`` of the initial motional state then
evolves into a Gaussian in phase space, centred on ``u(t) alpha`` with
dispersion ``D(t) = nbar (1 - exp(-Gamma t))``.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import DegenerateDispersion, DomainError

_DEGENERATE_D = 1e-300
_SERIES_SWITCH = 1e-8


@dataclass(frozen=True)
class CarrierParams:
    gamma: float
    nu: float
    nbar: float

    def __post_init__(self):
        if self.gamma < 0:
            raise DomainError("gamma must be >= 0")
        if self.nu <= 0:
            raise DomainError("nu must be > 0")
        if self.nbar < 0:
            raise DomainError("nbar must be >= 0")


@dataclass(frozen=True)
class GridSpec:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    n_re: int = 201
    n_im: int = 201

    @classmethod
    def default_for(cls, alpha, nbar, n=201):
        half = abs(alpha) + 4.0 * math.sqrt(nbar + 1.0)
        return cls(-half, half, -half, half, n, n)

    def axes(self):
        return (np.linspace(self.re_min, self.re_max, self.n_re),
                np.linspace(self.im_min, self.im_max, self.n_im))


@dataclass(frozen=True)
class GaussianPState:
    alpha1: complex
    alpha2: complex
    t: float
    u: complex
    dispersion: float
    prefactor: complex

    @classmethod
    def at(cls, p, alpha1, alpha2, t):
        alpha1, alpha2 = complex(alpha1), complex(alpha2)
        d = dispersion_D(p, t)
        overlap = cmath.exp(-0.5 * abs(alpha1) ** 2 - 0.5 * abs(alpha2) ** 2
                            + alpha1.conjugate() * alpha2)
        prefactor = overlap / (math.pi * d) if d > _DEGENERATE_D else complex("nan")
        return cls(alpha1, alpha2, float(t), propagator_u(p, t), d, prefactor)

    @property
    def center(self):
        return self.u * self.alpha2


def _check_time(t):
    if t < 0:
        raise DomainError("t must be >= 0")


def propagator_u(p, t):
    """Damped, rotating mode amplitude ``exp(-(Gamma/2 + i nu) t)``."""
    _check_time(t)
    return cmath.exp(-(0.5 * p.gamma + 1j * p.nu) * t)


def coupling_response_vk(p, gk, omega_k, t):
    """Amplitude ``v_k(t)`` carried by mode ``k`` into the ion's ``a(t)``.

    ``gk = eta_k * V_k`` in rad/s. Near ``omega_k = nu`` with ``Gamma -> 0``
    the ratio ``(1 - exp(-z t))/z`` is evaluated through ``expm1`` or its
    series so the removable singularity at ``z = 0`` is harmless.
    """
    _check_time(t)
    z = 0.5 * p.gamma - 1j * (omega_k - p.nu)
    zt = z * t
    if abs(zt) < _SERIES_SWITCH:
        ratio = t * (1.0 - zt / 2.0 + zt * zt / 6.0)
    else:
        ratio = -_expm1_complex(-zt) / z
    return -gk * cmath.exp(-1j * omega_k * t) * ratio


def _expm1_complex(w):
    # exp(x + iy) - 1 = expm1(x) cos y - 2 sin^2(y/2) + i e^x sin y
    x, y = w.real, w.imag
    real = math.expm1(x) * math.cos(y) - 2.0 * math.sin(0.5 * y) ** 2
    return complex(real, math.exp(x) * math.sin(y))


def dispersion_D(p, t):
    _check_time(t)
    return -p.nbar * math.expm1(-p.gamma * t)


def conditional_P(s, gamma_point):
    """Evaluate the P function of ``s`` at phase-space point(s) ``gamma_point``.

    Accepts scalars or arrays. For ``alpha1 == alpha2`` the result is a
    normalized real Gaussian (with respect to ``d Re d Im``).
    """
    if not s.dispersion > _DEGENERATE_D:
        raise DegenerateDispersion(
            f"dispersion {s.dispersion:.3e} at t={s.t}; use the moment formulas"
        )
    g = np.asarray(gamma_point, dtype=complex)
    left = np.conj(g) - np.conj(s.u * s.alpha1)
    right = g - s.u * s.alpha2
    out = s.prefactor * np.exp(-left * right / s.dispersion)
    return out if out.ndim else complex(out)


def mean_excitation(p, alpha, t):
    """``<a^dagger a>(t)`` starting from the coherent state ``|alpha>``."""
    return abs(propagator_u(p, t) * alpha) ** 2 + dispersion_D(p, t)


def pgrid(p, alpha, t, grid=None):
    """Sample the (real, nonnegative) P function of ``|alpha><alpha|`` on a grid.

    Returns ``(re_axis, im_axis, values)`` with ``values[j, i]`` taken at
    ``re_axis[i] + 1j*im_axis[j]``.
    """
    if grid is None:
        grid = GridSpec.default_for(alpha, p.nbar)
    s = GaussianPState.at(p, alpha, alpha, t)
    re, im = grid.axes()
    values = np.real(conditional_P(s, re[None, :] + 1j * im[:, None]))
    return re, im, np.maximum(values, 0.0)


def grid_moments(re, im, values):
    """Trapezoid estimates of (mass, mean, central second moment) of a grid."""
    def integrate(f):
        return trapezoid(trapezoid(f, re, axis=1), im)

    gamma = re[None, :] + 1j * im[:, None]
    mass = integrate(values)
    mean = complex(integrate(values * gamma.real), integrate(values * gamma.imag)) / mass
    var = integrate(values * np.abs(gamma - mean) ** 2) / mass
    return float(mass), mean, float(var)
