"""Complex-argument special functions: gamma, zeta, Dirichlet beta, Bessel K, xi.

All functions take a Python number (real or complex) and return ``complex``.
Nothing here depends on scipy; the test-suite checks these against mpmath.
"""
from __future__ import annotations

import cmath
import math
from numbers import Number

import numpy as np

from .errors import DomainError, PoleError, TruncationError

POLE_RADIUS = 1e-8
LIMIT_RADIUS = 1e-10

_LN2 = math.log(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def as_complex(s) -> complex:
    """Coerce ``s`` to ``complex``, rejecting NaN and infinities."""
    if not isinstance(s, Number):
        raise DomainError(f"expected a number, got {type(s).__name__}")
    z = complex(s)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite argument {s!r}")
    return z


def _near_nonpositive_integer(z: complex, radius: float) -> bool:
    if z.real > 0.5:
        return False
    k = round(z.real)
    return k <= 0 and abs(z - k) < radius


def _lanczos_gamma(z: complex) -> complex:
    # valid for Re z >= 1/2
    z -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return cmath.exp(_LOG_SQRT_2PI + (z + 0.5) * cmath.log(t) - t) * acc


def gamma_complex(s) -> complex:
    """Gamma function via Lanczos, with reflection for Re(s) < 1/2."""
    z = as_complex(s)
    if _near_nonpositive_integer(z, POLE_RADIUS):
        raise PoleError(f"gamma has a pole near {z}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * _lanczos_gamma(1.0 - z))
    return _lanczos_gamma(z)


def rgamma(s) -> complex:
    """Reciprocal gamma ``1/Gamma(s)``; entire, exactly zero at the poles of gamma."""
    z = as_complex(s)
    if z.real < 0.5:
        if z.imag == 0.0 and z.real == round(z.real):
            return 0j
        return cmath.sin(math.pi * z) * _lanczos_gamma(1.0 - z) / math.pi
    return 1.0 / _lanczos_gamma(z)


def _cvz_terms(s: complex) -> int:
    # error of the accelerated sum decays like (3+sqrt 8)^-n but grows like exp(pi|Im s|/2)
    return int(math.ceil((0.5 * math.pi * abs(s.imag) + 40.0 + 2.0 * max(0.0, -s.real)) / 1.76)) + 2


def _alternating(s: complex, odd: bool) -> complex:
    """Cohen-Villegas-Zagier acceleration of sum_k (-1)^k a_k.

    ``a_k = (k+1)^-s`` (Dirichlet eta) or ``(2k+1)^-s`` (Dirichlet beta).
    """
    n = _cvz_terms(s)
    d = (3.0 + math.sqrt(8.0)) ** n
    d = 0.5 * (d + 1.0 / d)
    b = -1.0
    c = -d
    acc = 0j
    for k in range(n):
        c = b - c
        base = 2 * k + 1 if odd else k + 1
        acc += c * cmath.exp(-s * math.log(base))
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0))
    return acc / d


def _expm1_ratio(z: complex) -> complex:
    """z / (exp(z) - 1), accurate near z = 0."""
    if abs(z) < 1e-3:
        # Bernoulli series
        return 1.0 - z / 2.0 + z * z / 12.0 - z ** 4 / 720.0
    return z / (cmath.exp(z) - 1.0)


def _eta(s: complex) -> complex:
    return _alternating(s, odd=False)


def _zeta_sm1_direct(s: complex) -> complex:
    """(s-1) zeta(s) for Re(s) >= 0, including s = 1."""
    # zeta = eta / (1 - 2^(1-s)) and (s-1)/(1-2^(1-s)) = z/(ln2 (e^z - 1)), z = (1-s) ln 2
    z = (1.0 - s) * _LN2
    return _eta(s) * _expm1_ratio(z) / _LN2


def _zeta_reflected(s: complex) -> complex:
    # zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s), for Re(s) < 0
    u = 1.0 - s
    zeta_u = _zeta_sm1_direct(u) / (u - 1.0)
    return (cmath.exp(s * _LN2 + (s - 1.0) * math.log(math.pi))
            * cmath.sin(0.5 * math.pi * s) * _lanczos_gamma(u) * zeta_u)


def zeta_complex(s) -> complex:
    """Riemann zeta for complex ``s != 1``.

    Re(s) >= 0 and the disk |s| < 1/2 use the accelerated eta series, the
    rest of Re(s) < 0 the functional equation (whose 1/(u-1) factor would
    cancel catastrophically near s = 0).
    """
    z = as_complex(s)
    if abs(z - 1.0) < POLE_RADIUS:
        raise PoleError("zeta has a pole at s = 1")
    if z.real < 0.0 and abs(z) >= 0.5:
        return _zeta_reflected(z)
    return _zeta_sm1_direct(z) / (z - 1.0)


def dirichlet_beta(s) -> complex:
    """Dirichlet beta ``sum_n (-1)^n (2n+1)^-s``, entire.

    Re(s) > 0 sums the accelerated alternating series; Re(s) <= 0 goes through
    the symmetry of ``(4/pi)^((s+1)/2) Gamma((s+1)/2) beta(s)``.
    """
    z = as_complex(s)
    if z.real > 0.0:
        val = _alternating(z, odd=True)
    else:
        u = 1.0 - z
        xi4_u = cmath.exp(0.5 * (u + 1.0) * math.log(4.0 / math.pi)) * _lanczos_gamma(0.5 * (u + 1.0)) \
            * _alternating(u, odd=True)
        val = xi4_u * cmath.exp(-0.5 * (z + 1.0) * math.log(4.0 / math.pi)) * rgamma(0.5 * (z + 1.0))
    if z.imag == 0.0:
        val = complex(val.real, 0.0)
    return val


# --- Bessel K -----------------------------------------------------------------

_BESSEL_T_MAX = 40.0
_SHIFTS = np.linspace(0.0, 0.5 * math.pi - 0.01, 200)


def _peak_log_modulus(phi, alpha: float, beta: float, a: float):
    # max over t of -a cosh(t) cos(phi) + alpha t - beta phi
    c = np.cos(phi)
    t = np.arcsinh(alpha / (a * c)) if alpha > 0 else 0.0
    return -a * c * np.cosh(t) + alpha * t - beta * phi


def _best_shift(alpha: float, beta: float, a: float) -> float:
    phis = math.copysign(1.0, beta) * _SHIFTS
    return float(phis[int(np.argmin(_peak_log_modulus(phis, alpha, beta, a)))])


def bessel_k(nu, a: float) -> complex:
    """Modified Bessel function of the second kind ``K_nu(a)``, complex order, a > 0.

    Evaluates ``(1/2) int_R exp(-a cosh t + nu t) dt`` by the trapezoidal rule,
    which converges double-exponentially for this integrand.  For complex
    orders the contour is shifted to ``t + i phi``, with ``phi`` chosen to
    minimize the peak of the integrand's modulus; on the real axis the
    oscillation would cancel down to ``exp(-pi |Im nu| / 2)`` of the peak.
    The order is canonicalized to ``Re(nu) >= 0`` first, so ``K_nu`` and
    ``K_-nu`` share one code path.
    """
    a = float(a)
    if not a > 0.0 or not math.isfinite(a):
        raise DomainError(f"bessel_k needs a > 0, got {a}")
    nu = as_complex(nu)
    if nu.real < 0.0 or (nu.real == 0.0 and nu.imag < 0.0):
        nu = -nu
    alpha, beta = nu.real, nu.imag
    phi = _best_shift(alpha, beta, a) if beta != 0.0 else 0.0
    cphi = math.cos(phi)

    # |integrand| = exp(-a cosh t cos phi + alpha t - beta phi); find where it is negligible
    def log_mag(t):
        return -a * math.cosh(t) * cphi + alpha * t

    peak = math.asinh(alpha / (a * cphi)) if alpha > 0 else 0.0
    top = log_mag(peak)
    if top - beta * phi > 700.0:
        raise TruncationError(f"K_nu(a) exceeds the double range for nu={nu}, a={a}")
    t_hi = peak
    while log_mag(t_hi) > top - 46.0:
        t_hi += 0.25
        if t_hi > _BESSEL_T_MAX:
            raise TruncationError(f"K_nu integrand does not decay for nu={nu}, a={a}")
    t_lo = 0.0
    while log_mag(t_lo) > top - 46.0:
        t_lo -= 0.25
        if t_lo < -_BESSEL_T_MAX:
            raise TruncationError(f"K_nu integrand does not decay for nu={nu}, a={a}")

    # oscillation frequency along the shifted contour bounds the step
    freq = a * math.cosh(max(abs(t_lo), abs(t_hi))) * abs(math.sin(phi)) + abs(beta)
    h = min(0.25, 2.0 / max(freq, 1.0))
    prev = None
    for _ in range(8):
        n = int(math.ceil((t_hi - t_lo) / h))
        t = t_lo + h * np.arange(n + 1)
        z = t + 1j * phi
        vals = np.exp(-a * np.cosh(z) + nu * z)
        total = 0.5 * h * np.sum(vals)
        # stop at the rounding floor of the sum, not only at a fixed relative change
        floor = 1e-15 * abs(total) + 32.0 * 2.0 ** -52 * 0.5 * h * np.sum(np.abs(vals))
        if prev is not None and abs(total - prev) <= floor:
            return complex(total)
        prev = total
        h *= 0.5
    raise TruncationError(f"K_nu trapezoid sums did not settle for nu={nu}, a={a}")


# --- xi -----------------------------------------------------------------------


def xi_closed_form(s) -> complex:
    """Riemann xi ``(1/2) s (s-1) pi^(-s/2) Gamma(s/2) zeta(s)``, entire.

    Evaluated as ``(s-1) zeta(s) * pi^(-s/2) Gamma(1 + s/2)`` for Re(s) >= 0 and
    through the zeta reflection formula (which cancels every pole) for Re(s) < 0.
    """
    z = as_complex(s)
    if abs(z) < LIMIT_RADIUS or abs(z - 1.0) < LIMIT_RADIUS:
        return 0.5 + 0j
    if z.real >= 0.0:
        return _zeta_sm1_direct(z) * cmath.exp(-0.5 * z * math.log(math.pi)) * _lanczos_gamma(1.0 + 0.5 * z)
    u = 1.0 - z
    # xi(s) = -(s-1)/2 pi^(s/2) 2^s Gamma(1-s) [(u-1) zeta(u)] / Gamma(1 - s/2)
    return (-0.5 * (z - 1.0) * cmath.exp(0.5 * z * math.log(math.pi) + z * _LN2)
            * _lanczos_gamma(u) * _zeta_sm1_direct(u) * rgamma(1.0 - 0.5 * z))
