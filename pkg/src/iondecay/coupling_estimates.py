"""Polarization coupling between the ion and the residual background gas.

Two groups of results live here: the classical ion-neutral collision
estimates (polarization potential, Langevin capture) and the quantized
coupling of the ion to background-gas surface oscillations, which involves
the modified Bessel function ``K1``. All inputs and outputs are SI.
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional

from scipy.constants import epsilon_0, hbar

from .errors import DomainError

EULER_GAMMA = 0.5772156649015329
_SERIES_MAX_X = 2.0
_EPS = 1e-16
_MAX_ITER = 10000


# ---------------------------------------------------------------------------
# Modified Bessel function K1
# ---------------------------------------------------------------------------

def _k1_series_parts(x):
    """Return ``(I1(x), S(x))`` with S the digamma-weighted ascending sum.

    ``K1(x) = 1/x + ln(x/2) I1(x) - (x/4) S(x)`` where
    ``S = sum_k [psi(k+1) + psi(k+2)] (x^2/4)^k / (k! (k+1)!)``.
    """
    y = 0.25 * x * x
    term = 1.0                       # (x^2/4)^k / (k! (k+1)!)
    psi_sum = -2.0 * EULER_GAMMA + 1.0   # psi(1) + psi(2)
    i1_sum = term
    s = psi_sum * term
    k = 0
    while True:
        k += 1
        term *= y / (k * (k + 1))
        psi_sum += 1.0 / k + 1.0 / (k + 1)
        i1_sum += term
        s += psi_sum * term
        if term < _EPS * i1_sum and abs(psi_sum * term) < _EPS * abs(s):
            break
    return 0.5 * x * i1_sum, s


def _k1_series(x):
    i1, s = _k1_series_parts(x)
    return 1.0 / x + math.log(0.5 * x) * i1 - 0.25 * x * s


def _k1_scaled_continued_fraction(x):
    """``exp(x) K1(x)`` from Steed's continued fraction (Temme), for x >= 2."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, _MAX_ITER):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:  # pragma: no cover
        raise ArithmeticError(f"K1 continued fraction did not converge at x={x}")
    h = a1 * h
    k0_scaled = math.sqrt(math.pi / (2.0 * x)) / s
    return k0_scaled * (x + 0.5 - h) / x


def bessel_k1_scaled(x):
    """``exp(x) * K1(x)``; finite for every ``x > 0``."""
    if not x > 0:
        raise DomainError(f"K1 needs x > 0, got {x}")
    if x < _SERIES_MAX_X:
        return math.exp(x) * _k1_series(x)
    return _k1_scaled_continued_fraction(x)


def bessel_k1(x):
    """Modified Bessel function of the second kind, order one."""
    if not x > 0:
        raise DomainError(f"K1 needs x > 0, got {x}")
    if x < _SERIES_MAX_X:
        return _k1_series(x)
    if x > 745.0:
        return 0.0
    return math.exp(-x) * _k1_scaled_continued_fraction(x)


def one_minus_x_k1(x):
    """``1 - x K1(x)`` without cancellation at small ``x``."""
    if not x > 0:
        raise DomainError(f"K1 needs x > 0, got {x}")
    if x < _SERIES_MAX_X:
        i1, s = _k1_series_parts(x)
        return -x * math.log(0.5 * x) * i1 + 0.25 * x * x * s
    return 1.0 - x * bessel_k1(x)


def bessel_k1_asymptotic(x, terms=8):
    """Large-``x`` asymptotic series ``sqrt(pi/2x) e^-x sum_k a_k(1) / x^k``."""
    total, term = 1.0, 1.0
    for k in range(1, terms + 1):
        term *= (4.0 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        total += term
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * total


# ---------------------------------------------------------------------------
# Collision estimates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GasIonSystem:
    """Ion plus background gas.

    ``chi`` is the polarizability volume (m^3); ``rho_number`` is the gas
    number density (1/m^3), ``rho_mass`` the areal mass density used when
    quantizing the surface oscillations (kg/m^2); ``z`` is the mean ion-gas
    spacing and ``S`` the surface area. The trailing fields are only needed
    by the quantized-coupling functions and may be left as ``None`` for the
    collision estimates.
    """

    chi: float
    q: float
    rho_number: float
    reduced_mass: float
    rel_velocity: float
    ion_mass: Optional[float] = None
    trap_freq: Optional[float] = None
    rho_mass: Optional[float] = None
    z: Optional[float] = None
    S: Optional[float] = None

    def __post_init__(self):
        for name, value in vars(self).items():
            if value is None:
                continue
            if name == "rho_number" and value == 0:
                continue
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value}")

    def require(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise DomainError(f"GasIonSystem is missing {', '.join(missing)}")

    @property
    def coupling_strength(self):
        """``Lambda = pi * chi * rho * q^2 / (2 * 4 pi eps0)`` in J m."""
        return math.pi * self.chi * self.rho_number * self.q**2 / (8.0 * math.pi * epsilon_0)


def polarization_potential(sys, r):
    """Ion-induced-dipole energy ``-chi q^2 / (8 pi eps0 r^4)`` in J."""
    if not r > 0:
        raise DomainError(f"r must be > 0, got {r}")
    return -sys.chi * sys.q**2 / (8.0 * math.pi * epsilon_0 * r**4)


@dataclass(frozen=True)
class LangevinRates:
    impact_param: float
    rate_const: float
    reaction_rate: float
    reaction_rate_closed_form: float


def langevin_rates(sys):
    """Critical impact parameter, Langevin rate constant and capture rate."""
    m, v = sys.reduced_mass, sys.rel_velocity
    b = (sys.chi * sys.q**2 / (math.pi * epsilon_0 * m * v**2)) ** 0.25
    rate_const = math.pi * b**2 * v
    closed = sys.rho_number * sys.q * math.sqrt(math.pi * sys.chi / (epsilon_0 * m))
    return LangevinRates(b, rate_const, sys.rho_number * rate_const, closed)


# ---------------------------------------------------------------------------
# Quantized coupling
# ---------------------------------------------------------------------------

class DispersionForm(str, enum.Enum):
    POWER_LAW = "power_law"


@dataclass(frozen=True)
class DispersionLaw:
    """``omega(k) = amplitude * k**exponent``; amplitude has no default."""

    amplitude: float
    exponent: float = 1.5
    form: DispersionForm = DispersionForm.POWER_LAW

    def __post_init__(self):
        if not self.amplitude > 0:
            raise DomainError("dispersion amplitude must be > 0")
        object.__setattr__(self, "form", DispersionForm(self.form))

    def omega(self, k):
        return self.amplitude * k**self.exponent


def eta_k(k, sys):
    """Lamb-Dicke-like parameter ``k * sqrt(hbar / (2 m nu))``."""
    if k < 0:
        raise DomainError("k must be >= 0")
    sys.require("ion_mass", "trap_freq")
    return k * math.sqrt(hbar / (2.0 * sys.ion_mass * sys.trap_freq))


def quantization_amplitude(k, sys, disp):
    """``C_k = sqrt(hbar / (2 rho_mass omega(k)))`` in m^2."""
    sys.require("rho_mass")
    return math.sqrt(hbar / (2.0 * sys.rho_mass * disp.omega(k)))


def coupling_bracket(k, z):
    """``1/z - k K1(k z)``, the geometric factor of the coupling (1/m)."""
    if not z > 0:
        raise DomainError(f"z must be > 0, got {z}")
    if k == 0:
        return 0.0
    return one_minus_x_k1(k * z) / z


def coupling_vk(k, sys, disp):
    """Coupling ``V_k = Lambda C_k / (z sqrt(S)) [1/z - k K1(kz)]`` in rad/s.

    The energy is divided by ``hbar`` so that ``eta_k * V_k`` is an angular
    frequency. ``V_0 = 0``: the bracket vanishes faster than ``C_k`` grows.
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    sys.require("rho_mass", "z", "S")
    bracket = coupling_bracket(k, sys.z)
    if bracket == 0.0:
        return 0.0
    c_k = quantization_amplitude(k, sys, disp)
    energy = sys.coupling_strength * c_k / (sys.z * math.sqrt(sys.S)) * bracket
    return energy / hbar
