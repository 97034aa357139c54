"""Mixing densities on (0, inf) and the self-reciprocal densities built from them.

A mixing density ``g`` with ``g(x) = x^(-3/2) g(1/x)`` turns the variance
mixture ``f(x) = int (2 pi y)^(-1/2) exp(-x^2/(2y)) g(y) dy`` into a
self-reciprocal density, ``cf(t) = sqrt(2 pi) f(t)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import quadrature
from .errors import ConvergenceError, DomainError, NormalizationError, QuadratureError
from .specfun import bessel_k

SQRT_2PI = math.sqrt(2.0 * math.pi)
PI = math.pi

N_MAX = 10_000
SERIES_RTOL = 1e-17
# below this argument the series families are evaluated through g(x) = x^-3/2 g(1/x)
SERIES_SWITCH = 1.0
_CHUNK = 2048


class Family(enum.Enum):
    SINH_Z = "sinh_z"
    COSH_H1 = "cosh_h1"
    COSH_T = "cosh_t"
    GGC_ALPHA = "ggc_alpha"
    GIG = "gig"
    LEVY = "levy"
    CUSTOM_G1 = "custom_g1"


SERIES_FAMILIES = frozenset({Family.SINH_Z, Family.COSH_H1, Family.COSH_T})


# --- the three theta-type series ---------------------------------------------


def _sum_series(x: np.ndarray, term: Callable[[int, np.ndarray], np.ndarray], n0: int,
                n_max: int, alternating: bool = False) -> np.ndarray:
    total = np.zeros_like(x)
    scale = np.zeros_like(x)
    for n in range(n0, n_max + 1):
        t = term(n, x)
        total += t
        np.maximum(scale, np.abs(total), out=scale)
        # terms decay at least geometrically (ratio <= e^-pi at x >= 1), or alternate
        if np.all(np.abs(t) <= SERIES_RTOL * scale):
            return total
    raise ConvergenceError(f"series did not reach its tail bound within {n_max} terms")


def _sinh_z_term(n, x):
    a = PI * n * n
    # decaying factor first so huge x gives 0 rather than inf * 0
    return (2.0 * np.sqrt(x) * np.exp(-a * x)) * (2.0 * a * a * x - 3.0 * a)


def _sech_tanh(z):
    e = np.exp(-2.0 * z)
    sech = 2.0 * np.exp(-z) / (1.0 + e)
    tanh = (1.0 - e) / (1.0 + e)
    return sech, tanh


def h1_series(y, n_max: int = N_MAX) -> np.ndarray:
    """``H_1(y) = d/dy (y^2 d/dy theta_c(y))`` with ``theta_c(y) = sum_n sech(n pi y)``.

    Summed directly; accurate for ``y`` of order one and above.
    """
    y = np.asarray(y, dtype=float)

    def term(n, y):
        z = n * PI * y
        sech, tanh = _sech_tanh(z)
        return (2.0 * sech * z) * (z * (tanh * tanh - sech * sech) - 2.0 * tanh)

    return _sum_series(y, term, 1, n_max)


def _cosh_h1_direct(x, n_max=N_MAX):
    r = np.sqrt(x)
    return h1_series(r, n_max) / (2.0 * r)


def _cosh_t_term(n, x):
    m = n + 0.5
    return (-1.0) ** n * 2.0 * m * np.exp(-m * m * PI * x)


def _series_direct(family: Family, x: np.ndarray, n_max: int = N_MAX) -> np.ndarray:
    if family is Family.SINH_Z:
        return _sum_series(x, _sinh_z_term, 1, n_max)
    if family is Family.COSH_H1:
        return _cosh_h1_direct(x, n_max)
    return _sum_series(x, _cosh_t_term, 0, n_max, alternating=True)


def _series_pdf(family: Family, x: np.ndarray, n_max: int) -> np.ndarray:
    out = np.empty_like(x)
    big = x >= SERIES_SWITCH
    if np.any(big):
        out[big] = _series_direct(family, x[big], n_max)
    small = ~big
    if np.any(small):
        xs = x[small]
        v = _series_direct(family, 1.0 / xs, n_max)
        out[small] = np.where(v == 0.0, 0.0, xs ** -1.5 * v)
    return out


# --- Laplace transforms used by the GGC construction -------------------------


def ggc_laplace(a: float, alpha: float) -> Callable[[np.ndarray], np.ndarray]:
    """``h(x) = exp(-a x^alpha)``, the Laplace transform of a positive stable GGC."""

    def h(x):
        return np.exp(-a * np.power(x, alpha))

    h.__qualname__ = f"ggc_laplace(a={a}, alpha={alpha})"
    return h


# --- mixing density objects ------------------------------------------------


@dataclass(frozen=True, eq=False)
class MixingDensitySpec:
    """A mixing density ``g`` on (0, inf) satisfying ``g(x) = x^(-3/2) g(1/x)``.

    Construct through the family helpers (:func:`sinh_z`, :func:`gig`, ...)
    rather than directly; they resolve the normalization constant eagerly.
    """

    family: Family
    params: Mapping[str, float] = field(default_factory=dict)
    norm_const: float = 1.0
    h: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        object.__setattr__(self, "params", dict(self.params))
        if not (self.norm_const > 0 and math.isfinite(self.norm_const)):
            raise NormalizationError(f"invalid normalization constant {self.norm_const}")

    def __repr__(self):
        ps = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"MixingDensitySpec({self.family.value}{', ' + ps if ps else ''})"

    @property
    def label(self) -> str:
        ps = ",".join(f"{k}={v:g}" for k, v in self.params.items() if k != "n_max")
        return f"{self.family.value}({ps})" if ps else self.family.value

    def pdf(self, x) -> np.ndarray:
        """Vectorized density; ``x`` must be positive."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        if np.any(~(x > 0)):
            raise DomainError("mixing densities are defined for x > 0 only")
        with np.errstate(over="ignore", under="ignore"):
            out = self._pdf(x)
        return out[0] if scalar else out

    __call__ = pdf

    def _pdf(self, x: np.ndarray) -> np.ndarray:
        fam, p = self.family, self.params
        if fam in SERIES_FAMILIES:
            return _series_pdf(fam, x, int(p.get("n_max", N_MAX)))
        if fam is Family.GIG:
            a = p["a"]
            return self.norm_const * x ** -0.75 * np.exp(-0.5 * a * (x + 1.0 / x))
        if fam is Family.LEVY:
            lam = p["lam"]
            q = x ** 0.25 - x ** -0.25
            return self.norm_const * x ** -0.75 * np.exp(-lam * q * q)
        # GGC_ALPHA and CUSTOM_G1 share the x^-3/4 h(x) h(1/x) construction
        return self.norm_const * x ** -0.75 * self.h(x) * self.h(1.0 / x)

    def moment(self, power: float) -> float:
        """``int_0^inf y^power g(y) dy`` by quadrature."""
        def f(y):
            v = self.pdf(y)
            return np.where(v == 0.0, 0.0, y ** power * v)

        return float(quadrature.integrate(f, 0.0, tol=1e-14))


def _unnormalized_integral(h, x_power: float = -0.75) -> float:
    def f(x):
        return x ** x_power * h(x) * h(1.0 / x)

    try:
        total = quadrature.integrate(f, 0.0, tol=1e-15)
    except QuadratureError as exc:
        raise NormalizationError(f"cannot normalize x^-3/4 h(x) h(1/x): {exc}") from exc
    if not total > 0:
        raise NormalizationError("x^-3/4 h(x) h(1/x) integrates to a non-positive value")
    return float(total)


def _check_positive_decreasing(h, grid=None):
    grid = np.logspace(-3, 3, 61) if grid is None else grid
    with np.errstate(all="ignore"):
        v = np.asarray(h(grid), dtype=float)
    # large-x values may underflow to 0, so strict positivity is asserted on (0, 1] only
    if np.any(~np.isfinite(v)) or np.any(v < 0) or np.any(v[grid <= 1.0] <= 0):
        raise DomainError("h must be positive and finite on (0, inf)")
    if np.any(np.diff(v) > 1e-15 * v[:-1]):
        raise DomainError("h must be non-increasing")


# --- constructors ---------------------------------------------------------------


def sinh_z(n_max: int = N_MAX) -> MixingDensitySpec:
    """``f_z(x) = 2 sqrt(x) sum_n (2 pi^2 n^4 x - 3 pi n^2) exp(-pi n^2 x)``."""
    return MixingDensitySpec(Family.SINH_Z, {"n_max": n_max})


def cosh_h1(n_max: int = N_MAX) -> MixingDensitySpec:
    """``f_w(x) = H_1(sqrt x) / (2 sqrt x)``, see :func:`h1_series`."""
    return MixingDensitySpec(Family.COSH_H1, {"n_max": n_max})


def cosh_t(n_max: int = N_MAX) -> MixingDensitySpec:
    """``f_T(x) = 2 sum_{n>=0} (-1)^n (n + 1/2) exp(-(n + 1/2)^2 pi x)``."""
    return MixingDensitySpec(Family.COSH_T, {"n_max": n_max})


def gig(a: float) -> MixingDensitySpec:
    """Generalized inverse Gaussian with ``p = 1/4`` and equal rate parameters ``a``."""
    if not a > 0:
        raise DomainError("gig needs a > 0")
    c = 1.0 / (2.0 * bessel_k(0.25, a).real)
    return MixingDensitySpec(Family.GIG, {"a": float(a)}, c)


def levy(lam: float) -> MixingDensitySpec:
    """``g_4(x) = (1/2) sqrt(lam/pi) x^(-3/4) exp(-lam (x^(1/4) - x^(-1/4))^2)``."""
    if not lam > 0:
        raise DomainError("levy needs lam > 0")
    return MixingDensitySpec(Family.LEVY, {"lam": float(lam)}, 0.5 * math.sqrt(lam / PI))


def ggc_alpha(a: float, alpha: float) -> MixingDensitySpec:
    """``g_2(x) = c x^(-3/4) exp(-a (x^alpha + x^-alpha))``, c fixed by normalization."""
    if not a > 0:
        raise DomainError("ggc_alpha needs a > 0")
    if not 0 < alpha <= 1:
        raise DomainError("ggc_alpha needs 0 < alpha <= 1")
    h = ggc_laplace(float(a), float(alpha))
    c = 1.0 / _unnormalized_integral(h)
    return MixingDensitySpec(Family.GGC_ALPHA, {"a": float(a), "alpha": float(alpha)}, c, h)


def make_custom_g1(h: Callable[[np.ndarray], np.ndarray], **params: float) -> MixingDensitySpec:
    """Build ``g_1(x) = c x^(-3/4) h(x) h(1/x)`` from a positive decreasing ``h``.

    ``h`` should be the Laplace transform of a GGC; only positivity and
    monotonicity are spot-checked.  ``c`` is the normalizing constant.
    """
    _check_positive_decreasing(h)
    c = 1.0 / _unnormalized_integral(h)
    spec = MixingDensitySpec(Family.CUSTOM_G1, dict(params), c, h)
    x = np.array([0.3, 3.0])
    res = np.abs(spec.pdf(x) - x ** -1.5 * spec.pdf(1.0 / x))
    if np.any(res > 1e-12 * np.maximum(spec.pdf(x), 1e-300)):
        raise DomainError("h(x) h(1/x) construction is not reciprocal-symmetric")
    return spec


_CONSTRUCTORS = {
    Family.SINH_Z: lambda **p: sinh_z(**p),
    Family.COSH_H1: lambda **p: cosh_h1(**p),
    Family.COSH_T: lambda **p: cosh_t(**p),
    Family.GIG: lambda **p: gig(p["a"]),
    Family.LEVY: lambda **p: levy(p["lam"]),
    Family.GGC_ALPHA: lambda **p: ggc_alpha(p["a"], p["alpha"]),
}


def make_family(family: Family | str, **params: float) -> MixingDensitySpec:
    """Construct a built-in family by tag, e.g. ``make_family("gig", a=1)``."""
    family = Family(family)
    if family is Family.CUSTOM_G1:
        raise DomainError("custom_g1 needs an h evaluator; use make_custom_g1")
    try:
        return _CONSTRUCTORS[family](**params)
    except KeyError as exc:
        raise DomainError(f"missing parameter {exc} for family {family.value}") from None


def normalize(family: Family | str, params: Mapping[str, float] | None = None,
              h: Callable | None = None) -> float:
    """The constant ``c`` that makes the family a probability density.

    GGC and custom families are normalized by quadrature; GIG and Levy
    return their closed-form constants.
    """
    family = Family(family)
    params = dict(params or {})
    if family is Family.GGC_ALPHA:
        return 1.0 / _unnormalized_integral(ggc_laplace(params["a"], params["alpha"]))
    if family is Family.CUSTOM_G1:
        if h is None:
            raise DomainError("custom_g1 normalization needs h")
        return 1.0 / _unnormalized_integral(h)
    if family in (Family.GIG, Family.LEVY):
        return make_family(family, **params).norm_const
    raise DomainError(f"family {family.value} has no free normalization constant")


def mixing_pdf(g: MixingDensitySpec, x):
    """Density of the mixing law at ``x > 0``."""
    return g.pdf(x)


def mixing_symmetry_residual(g: MixingDensitySpec, x):
    """``g(x) - x^(-3/2) g(1/x)``.

    For the series families both sides are summed directly (no reciprocal
    fallback) when ``1/20 <= x <= 20``, so the residual tests the identity
    rather than assuming it.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(x > 0)):
        raise DomainError("x must be positive")
    if g.family in SERIES_FAMILIES:
        n_max = int(g.params.get("n_max", N_MAX))
        direct = (x >= 0.05) & (x <= 20.0)
        left = g.pdf(x)
        right = x ** -1.5 * g.pdf(1.0 / x)
        if np.any(direct):
            xd = x[direct]
            left[direct] = _series_direct(g.family, xd, n_max)
            right[direct] = xd ** -1.5 * _series_direct(g.family, 1.0 / xd, n_max)
        res = left - right
    else:
        res = g.pdf(x) - x ** -1.5 * g.pdf(1.0 / x)
    return res if res.size > 1 else float(res[0])


# --- self-reciprocal densities on R ------------------------------------------


class DensityKind(enum.Enum):
    GAUSSIAN = "gaussian"
    COSH = "cosh"
    MIXTURE = "mixture"


@dataclass(frozen=True, eq=False)
class SRDensity:
    """A symmetric self-reciprocal density: Gaussian, hyperbolic cosh, or a variance mixture."""

    kind: DensityKind
    mixing: MixingDensitySpec | None = None

    def __post_init__(self):
        if (self.kind is DensityKind.MIXTURE) != (self.mixing is not None):
            raise DomainError("a mixing spec is required exactly for mixture densities")

    @property
    def label(self) -> str:
        return self.mixing.label if self.mixing is not None else self.kind.value

    def pdf(self, x):
        return mixture_pdf(self, x)

    def cf(self, t):
        return density_cf(self, t)


def gaussian() -> SRDensity:
    return SRDensity(DensityKind.GAUSSIAN)


def cosh_density() -> SRDensity:
    return SRDensity(DensityKind.COSH)


def mixture(g: MixingDensitySpec) -> SRDensity:
    return SRDensity(DensityKind.MIXTURE, g)


_HALF_PI_SQRT = math.sqrt(PI / 2.0)


def _mixture_transform(g: MixingDensitySpec, z: np.ndarray, kernel) -> np.ndarray:
    """Batch of ``int_0^inf kernel(y, z_j) g(y) dy`` over a DE rule in y."""
    out = np.empty_like(z)
    for lo in range(0, z.size, _CHUNK):
        zc = z[lo:lo + _CHUNK]

        def f(y, zc=zc):
            gy = g.pdf(y)
            k = kernel(y[:, None], zc[None, :])
            return np.where(gy[:, None] > 0, k * gy[:, None], 0.0)

        out[lo:lo + _CHUNK] = quadrature.integrate(f, 0.0, tol=1e-14, abs_tol=1e-17)
    return out


def _normal_pdf_kernel(y, x):
    return np.exp(-0.5 * x * x / y) / np.sqrt(2.0 * PI * y)


def _normal_cf_kernel(y, t):
    return np.exp(-0.5 * y * t * t)


def mixture_pdf(f: SRDensity, x):
    """Density of ``f`` on R.  Mixtures are integrated over the mixing law."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xa = np.abs(np.atleast_1d(x))
    with np.errstate(over="ignore", under="ignore"):
        if f.kind is DensityKind.GAUSSIAN:
            out = np.exp(-0.5 * xa * xa) / SQRT_2PI
        elif f.kind is DensityKind.COSH:
            out = 1.0 / (SQRT_2PI * np.cosh(_HALF_PI_SQRT * xa))
        else:
            out = _mixture_transform(f.mixing, xa, _normal_pdf_kernel)
    return float(out[0]) if scalar else out


def density_cf(f: SRDensity, t):
    """Characteristic function of ``f``; for mixtures ``int exp(-y t^2 / 2) g(y) dy``."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    ta = np.abs(np.atleast_1d(t))
    with np.errstate(over="ignore", under="ignore"):
        if f.kind is DensityKind.GAUSSIAN:
            out = np.exp(-0.5 * ta * ta)
        elif f.kind is DensityKind.COSH:
            out = 1.0 / np.cosh(_HALF_PI_SQRT * ta)
        else:
            out = np.ones_like(ta)
            nz = ta > 0
            if np.any(nz):
                out[nz] = _mixture_transform(f.mixing, ta[nz], _normal_cf_kernel)
    return float(out[0]) if scalar else out
