"""Mellin transforms of psi, their entire continuations, and the closed-form xi functions.

Continuation goes only through the split integrals

    xi(s)   = s(s-1) int_1^inf (x^(s-1) + x^(-s)) psi(x) dx + 1/2
    xi_1(s) = int_1^inf (x^(-s/2) + x^((s-1)/2)) g(x) dx

which are entire and symmetric under ``s -> 1 - s`` term by term.
"""
from __future__ import annotations

import cmath
import math
import threading
import weakref
from dataclasses import dataclass

import numpy as np

from .density import MixingDensitySpec, mixture
from .errors import ConvergenceError, DomainError, QuadratureError, TruncationError
from .quadrature import de_nodes
from .specfun import (
    LIMIT_RADIUS,
    _lanczos_gamma,
    _zeta_sm1_direct,
    as_complex,
    bessel_k,
    dirichlet_beta,
    gamma_complex,
    xi_closed_form,
    zeta_complex,
)
from .theta import ThetaSeries, theta_series

X_CAP = 1.0e4
RE_S_MAX = 60.0
MIN_LEVEL = 3
MAX_LEVEL = 11
TOL = 1e-15

_LOG_4_OVER_PI = math.log(4.0 / math.pi)
_LOG_PI = math.log(math.pi)

# exp-sinh on [1, inf): x = 1 + exp(pi/2 sinh t); t_hi puts the last node near X_CAP
_UPPER_T = (-5.0, math.asinh(math.log(X_CAP - 1.0) / (0.5 * math.pi)))
# exp-sinh on (0, inf) for the direct transform, capped the same way
_FULL_T = (-6.5, math.asinh(math.log(X_CAP) / (0.5 * math.pi)))


def _pow_times(p: complex, logx: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``x**p * v`` evaluated in log space so 0 * overflow never happens."""
    out = np.zeros(v.shape, dtype=complex)
    nz = v != 0.0
    out[nz] = np.sign(v[nz]) * np.exp(p * logx[nz] + np.log(np.abs(v[nz])))
    return out


def _level_nodes(a: float, t_range, level: int):
    odd = level > MIN_LEVEL
    _, x, w = de_nodes("exp-sinh", level, a=a, t_range=t_range, odd_only=odd)
    return x, w


def _adaptive(level_terms, what: str, capped: bool = True) -> complex:
    """Sum nested trapezoid levels until successive estimates agree.

    ``level_terms(level)`` returns the weighted terms for the nodes first
    introduced at that level (all nodes at ``MIN_LEVEL``).  With ``capped`` the
    last node sits at ``X_CAP`` and must carry a negligible share.
    """
    terms = level_terms(MIN_LEVEL)
    total = terms.sum()
    l1 = np.abs(terms).sum()
    edge = np.abs(terms[-1])
    for level in range(MIN_LEVEL + 1, MAX_LEVEL + 1):
        terms = level_terms(level)
        new = 0.5 * total + terms.sum()
        l1 = 0.5 * l1 + np.abs(terms).sum()
        err = abs(new - total)
        total = new
        if level >= MIN_LEVEL + 2 and err <= TOL * l1 + 1e-300:
            if capped and edge > 1e-16 * max(l1, 1e-300):
                raise TruncationError(f"{what}: integrand not negligible at the x cap {X_CAP:g}")
            return complex(total)
    raise QuadratureError(f"{what}: no convergence by level {MAX_LEVEL} (error {err:.2e})")


def _psi_upper_nodes(ts: ThetaSeries, level: int):
    def compute():
        x, w = _level_nodes(1.0, _UPPER_T, level)
        return np.log(x), w, ts.psi(x)

    return ts.cached(("upper", level), compute)


def _psi_full_nodes(ts: ThetaSeries, level: int):
    def compute():
        x, w = _level_nodes(0.0, _FULL_T, level)
        return np.log(x), w, ts.psi(x)

    return ts.cached(("full", level), compute)


def _symmetric_psi_integral(ts: ThetaSeries, s: complex) -> complex:
    """``int_1^inf (x^(s-1) + x^(-s)) psi(x) dx``."""

    def level_terms(level):
        logx, w, p = _psi_upper_nodes(ts, level)
        return w * (_pow_times(s - 1.0, logx, p) + _pow_times(-s, logx, p))

    return _adaptive(level_terms, f"xi_entire({ts.label}, {s})")


def _check_re(s: complex):
    if abs(s.real) > RE_S_MAX:
        raise ConvergenceError(f"|Re s| must not exceed {RE_S_MAX}")


def eta_direct(ts: ThetaSeries, s) -> complex:
    """Mellin transform ``int_0^inf x^(s-1) psi(x) dx`` for Re(s) > 1."""
    s = as_complex(s)
    if not s.real > 1.0:
        raise DomainError("eta_direct converges only for Re(s) > 1; use xi_entire")
    _check_re(s)

    def level_terms(level):
        logx, w, p = _psi_full_nodes(ts, level)
        return w * _pow_times(s - 1.0, logx, p)

    return _adaptive(level_terms, f"eta_direct({ts.label}, {s})")


def xi_entire(ts: ThetaSeries, s) -> complex:
    """``s(s-1) eta(s)`` continued to all of C through the split integral."""
    s = as_complex(s)
    _check_re(s)
    return s * (s - 1.0) * _symmetric_psi_integral(ts, s) + 0.5


_MIXING_CACHE: "weakref.WeakKeyDictionary[MixingDensitySpec, dict]" = weakref.WeakKeyDictionary()
_MIXING_LOCK = threading.Lock()


def _mixing_upper_nodes(g: MixingDensitySpec, level: int):
    with _MIXING_LOCK:
        per = _MIXING_CACHE.setdefault(g, {})
        if level not in per:
            _, x, w = de_nodes("exp-sinh", level, a=1.0, odd_only=level > MIN_LEVEL)
            per[level] = (np.log(x), w, np.atleast_1d(g.pdf(x)))
        return per[level]


def xi1_entire(g: MixingDensitySpec, s) -> complex:
    """Second-order factor ``int_0^inf x^((s-1)/2) g(x) dx``, continued through
    ``int_1^inf (x^(-s/2) + x^((s-1)/2)) g(x) dx``."""
    s = as_complex(s)
    _check_re(s)

    def level_terms(level):
        logx, w, gv = _mixing_upper_nodes(g, level)
        return w * (_pow_times(-0.5 * s, logx, gv) + _pow_times(0.5 * (s - 1.0), logx, gv))

    # full exp-sinh range, which reaches x ~ 1e228, so no cap check
    return _adaptive(level_terms, f"xi1_entire({g.label}, {s})", capped=False)


def xi2_product(g: MixingDensitySpec, s) -> complex:
    """``xi_0(s) * xi_1(s)``, the factorized second-order xi of the mixture built on ``g``."""
    return xi_closed_form(s) * xi1_entire(g, s)


def eta_mixture_closed(g: MixingDensitySpec, s) -> complex:
    """``(1/2) pi^(-s/2) Gamma(s/2) zeta(s) xi_1(s)`` for Re(s) > 1."""
    s = as_complex(s)
    if not s.real > 1.0:
        raise DomainError("closed-form eta_M needs Re(s) > 1")
    return 0.5 * cmath.exp(-0.5 * s * _LOG_PI) * gamma_complex(0.5 * s) * zeta_complex(s) * xi1_entire(g, s)


def xi4_closed(s) -> complex:
    """``(4/pi)^((s+1)/2) Gamma((s+1)/2) beta(s)``; Re(s) <= 0 is mapped to ``1 - s``."""
    s = as_complex(s)
    if s.real <= 0.0:
        s = 1.0 - s
    return cmath.exp(0.5 * (s + 1.0) * _LOG_4_OVER_PI) * _lanczos_gamma(0.5 * (s + 1.0)) * dirichlet_beta(s)


def xic_closed(s) -> complex:
    """``2 s(s-1) pi^-s Gamma(s) zeta(s) beta(s)``, the xi of the hyperbolic cosh density.

    Evaluated as ``2 (s-1) zeta(s) pi^-s Gamma(1+s) beta(s)``; below Re(s) = -1/2,
    where Gamma(1+s) meets its poles, the value at ``1 - s`` is returned.
    """
    s = as_complex(s)
    if abs(s) < LIMIT_RADIUS or abs(s - 1.0) < LIMIT_RADIUS:
        return 0.5 + 0j
    if s.real < -0.5:
        s = 1.0 - s
    if s.real >= 0.0:
        sm1_zeta = _zeta_sm1_direct(s)
    else:
        sm1_zeta = (s - 1.0) * zeta_complex(s)
    return 2.0 * sm1_zeta * cmath.exp(-s * _LOG_PI) * gamma_complex(1.0 + s) * dirichlet_beta(s)


def xi_g3_closed(s, a: float) -> complex:
    """``K_{(2s-1)/4}(a) / K_{1/4}(a)``, the second-order factor of the GIG mixing law."""
    s = as_complex(s)
    return bessel_k(0.5 * s - 0.25, a) / bessel_k(0.25, a)


# --- composable xi functions ------------------------------------------------------


class XiFunction:
    """A function of complex ``s`` expected to satisfy ``F(s) = F(1 - s)``."""

    label = "xi"

    def __call__(self, s) -> complex:
        raise NotImplementedError

    def __mul__(self, other):
        if isinstance(other, XiFunction):
            return Product(self, other)
        return Scaled(float(other), self)

    def __rmul__(self, other):
        return Scaled(float(other), self)


@dataclass(frozen=True, eq=False)
class FromPsi(XiFunction):
    series: ThetaSeries

    @property
    def label(self):
        return f"entire[{self.series.label}]"

    def __call__(self, s):
        return xi_entire(self.series, s)


@dataclass(frozen=True, eq=False)
class Xi1FromMixing(XiFunction):
    mixing: MixingDensitySpec

    @property
    def label(self):
        return f"xi1[{self.mixing.label}]"

    def __call__(self, s):
        return xi1_entire(self.mixing, s)


@dataclass(frozen=True)
class ClosedRiemann(XiFunction):
    label = "riemann"

    def __call__(self, s):
        return xi_closed_form(s)


@dataclass(frozen=True)
class ClosedCosh(XiFunction):
    label = "cosh"

    def __call__(self, s):
        return xic_closed(s)


@dataclass(frozen=True)
class ClosedXi4(XiFunction):
    label = "xi4"

    def __call__(self, s):
        return xi4_closed(s)


@dataclass(frozen=True)
class ClosedG3(XiFunction):
    a: float = 1.0

    @property
    def label(self):
        return f"g3(a={self.a:g})"

    def __call__(self, s):
        return xi_g3_closed(s, self.a)


@dataclass(frozen=True, eq=False)
class Product(XiFunction):
    left: XiFunction
    right: XiFunction

    @property
    def label(self):
        return f"{self.left.label}*{self.right.label}"

    def __call__(self, s):
        return self.left(s) * self.right(s)


@dataclass(frozen=True, eq=False)
class Scaled(XiFunction):
    factor: float
    inner: XiFunction

    @property
    def label(self):
        return f"{self.factor:g}*{self.inner.label}"

    def __call__(self, s):
        return self.factor * self.inner(s)


def from_mixing(g: MixingDensitySpec, **kw) -> FromPsi:
    """The psi-built xi of the variance mixture over ``g``."""
    return FromPsi(theta_series(mixture(g), **kw))
