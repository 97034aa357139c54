"""Named verification checks that turn identities into residual reports.

Every registered identity compares a quadrature pipeline (theta/psi series,
mixture transforms, split Mellin integrals) against closed forms built from
``specfun``.  The two sides never share a code path; ``register`` refuses an
identity that is not flagged as disjoint.

Targets are short selector strings:

* densities: ``gaussian``, ``cosh``, or a mixing family such as ``gig:a=1``,
  ``levy:lam=1``, ``ggc_alpha:a=1,alpha=0.5``, ``sinh_z``, ``cosh_h1``,
  ``cosh_t``, ``custom_exp:a=1`` (h(x) = exp(-a x))
* xi functions: ``riemann``, ``cosh``, ``xi4``, ``g3:a=1``, ``psi:<density>``,
  ``xi1:<family>``
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from . import density as D
from . import mellin as M
from .errors import ConfigError, SelfZetaError
from .grids import SGrid, parse_grid, real_grid, standard_grid
from .specfun import xi_closed_form
from .theta import (
    ThetaSeries,
    poisson_density_residual,
    psi_reflection_residual,
    theta_modular_residual,
    theta_series,
)

MAX_TOLERANCE = 1e-2
TOL_CLOSED = 1e-9
TOL_PIPELINE = 1e-6

# --- target selectors -------------------------------------------------------------


def _parse_params(text: str) -> dict:
    params = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ConfigError(f"parameter {item!r} must look like name=value")
        try:
            params[key.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"parameter {item!r} is not numeric") from None
    return params


@lru_cache(maxsize=None)
def mixing_family(selector: str) -> D.MixingDensitySpec:
    """``"gig:a=1"`` -> the GIG mixing density with a = 1."""
    name, _, rest = selector.partition(":")
    params = _parse_params(rest)
    try:
        if name == "custom_exp":
            a = params.pop("a", 1.0)
            if params:
                raise ConfigError(f"custom_exp takes only 'a', got {sorted(params)}")
            return D.make_custom_g1(lambda x, a=a: np.exp(-a * x), a=a)
        return D.make_family(name, **params)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad mixing family {selector!r}: {exc}") from None


@lru_cache(maxsize=None)
def sr_density(selector: str) -> D.SRDensity:
    if selector == "gaussian":
        return D.gaussian()
    if selector == "cosh":
        return D.cosh_density()
    return D.mixture(mixing_family(selector))


@lru_cache(maxsize=None)
def series_for(selector: str) -> ThetaSeries:
    """Shared per selector so psi values on quadrature nodes are reused across checks."""
    return theta_series(sr_density(selector))


def xi_function(selector: str) -> M.XiFunction:
    name, _, rest = selector.partition(":")
    if name == "riemann" and not rest:
        return M.ClosedRiemann()
    if name == "cosh" and not rest:
        return M.ClosedCosh()
    if name == "xi4" and not rest:
        return M.ClosedXi4()
    if name == "g3":
        a = _parse_params(rest).get("a", 1.0)
        if not a > 0:
            raise ConfigError("g3 needs a > 0")
        return M.ClosedG3(a)
    if name == "psi":
        return M.FromPsi(series_for(rest))
    if name == "xi1":
        return M.Xi1FromMixing(mixing_family(rest))
    raise ConfigError(f"unknown xi selector {selector!r}")


# --- registry ---------------------------------------------------------------------

Residual = Callable[[complex], float]


@dataclass(frozen=True)
class CheckDef:
    name: str
    description: str
    build: Callable[[str | None], Residual]
    default_grid: Callable[[], SGrid]
    default_tol: float
    default_target: str | None = None
    kind: str = "identity"  # identity | property | stochastic
    disjoint: bool = False


REGISTRY: dict[str, CheckDef] = {}


def register(check: CheckDef) -> CheckDef:
    if check.kind == "identity" and not check.disjoint:
        raise ValueError(f"identity {check.name!r} must compare disjoint code paths")
    REGISTRY[check.name] = check
    return check


def _points(*vals) -> Callable[[], SGrid]:
    return lambda: SGrid(tuple(complex(v) for v in vals), ";".join(_fmt_point(complex(v)) for v in vals))


def _fmt_point(z: complex) -> str:
    return f"{z.real:g}" if z.imag == 0 else f"{z.real:g},{z.imag:g}"


def _half_step_real_grid() -> SGrid:
    return real_grid(-3.0, 4.0, 0.5)


def _diff(lhs: Callable[[complex], complex], rhs: Callable[[complex], complex]) -> Residual:
    return lambda s: abs(lhs(s) - rhs(s))


def _identity(name, description, lhs_rhs, grid=standard_grid, tol=TOL_PIPELINE, target=None):
    """Register ``|lhs(s) - rhs(s)|``; ``lhs_rhs(target)`` returns the two sides."""
    register(CheckDef(name, description, lambda t: _diff(*lhs_rhs(t)), grid, tol, target,
                      kind="identity", disjoint=True))


def _psi_xi(selector):
    ts = series_for(selector)
    return lambda s: M.xi_entire(ts, s)


_identity("gaussian_psi_xi", "xi from the Gaussian psi series vs the closed-form Riemann xi",
          lambda t: (_psi_xi("gaussian"), xi_closed_form), tol=1e-8)
_identity("cosh_psi_xi", "xi from the cosh psi series vs 2s(s-1)pi^-s Gamma zeta beta",
          lambda t: (_psi_xi("cosh"), M.xic_closed), tol=1e-8)
_identity("sinh_mixing_xi1", "xi_1 of the sinh mixing law vs 2 xi",
          lambda t: (M.Xi1FromMixing(mixing_family("sinh_z")), lambda s: 2.0 * xi_closed_form(s)),
          grid=_half_step_real_grid)
_identity("sinh_mixture_xi", "xi of the sinh-mixture psi series vs 2 xi^2",
          lambda t: (_psi_xi("sinh_z"), lambda s: 2.0 * xi_closed_form(s) ** 2),
          grid=_half_step_real_grid)
_identity("h1_mixing_xi1", "xi_1 of the H_1 mixing law vs 2 xi_c",
          lambda t: (M.Xi1FromMixing(mixing_family("cosh_h1")), lambda s: 2.0 * M.xic_closed(s)),
          grid=_half_step_real_grid)
_identity("h1_mixture_xi", "xi of the H_1-mixture psi series vs xi * 2 xi_c",
          lambda t: (_psi_xi("cosh_h1"), lambda s: 2.0 * xi_closed_form(s) * M.xic_closed(s)),
          grid=_half_step_real_grid)
_identity("cosh_t_mixing_xi1", "xi_1 of the f_T mixing law vs the xi_4 closed form",
          lambda t: (M.Xi1FromMixing(mixing_family("cosh_t")), M.xi4_closed), grid=_half_step_real_grid)
_identity("cosh_t_mixture_xi", "xi of the f_T-mixture psi series vs xi * xi_4",
          lambda t: (_psi_xi("cosh_t"), lambda s: xi_closed_form(s) * M.xi4_closed(s)),
          grid=_half_step_real_grid)


def _gig_a(selector: str) -> float:
    g = mixing_family(selector)
    if g.family is not D.Family.GIG:
        raise ConfigError(f"target must be a gig family, got {selector!r}")
    return g.params["a"]


_identity("gig_mixing_xi1", "xi_1 of the GIG(a) mixing law vs K_{(2s-1)/4}(a) / K_{1/4}(a)",
          lambda t: (M.Xi1FromMixing(mixing_family(t)), M.ClosedG3(_gig_a(t))),
          grid=_half_step_real_grid, target="gig:a=1")
_identity("gig_mixture_xi", "xi of the GIG-mixture psi series vs xi * Bessel ratio",
          lambda t: (_psi_xi(t), lambda s: xi_closed_form(s) * M.xi_g3_closed(s, _gig_a(t))),
          grid=_half_step_real_grid, target="gig:a=1")


def _ggc_vs_levy(_target):
    def residual(lam: complex) -> float:
        lam = lam.real
        got = D.normalize("ggc_alpha", {"a": lam, "alpha": 0.5})
        want = 0.5 * math.sqrt(lam / math.pi) * math.exp(2.0 * lam)
        return abs(got - want) / want

    return residual


register(CheckDef("ggc_normalizer", "relative error of the quadrature GGC(alpha=1/2, a=lambda) "
                  "normalizer vs (1/2) sqrt(lambda/pi) e^(2 lambda); grid points are lambda",
                  _ggc_vs_levy, _points(0.5, 1.0, 2.0), 1e-8, kind="identity", disjoint=True))

_FACTOR_GRID = _points(-2, -1, 0, 0.5, 1, 2, 3, 4, complex(0.5, 14.134725), complex(2, 3))
_identity("mixture_factorization", "xi of a mixture psi series vs xi_0 * xi_1 (factorization)",
          lambda t: (_psi_xi(t), lambda s: M.xi2_product(mixing_family(t), s)),
          grid=_FACTOR_GRID, target="gig:a=1")
_identity("custom_mixture_factorization", "xi of the custom h(x)=exp(-x) mixture psi series vs xi * xi_G1",
          lambda t: (_psi_xi(t), lambda s: M.xi2_product(mixing_family(t), s)),
          grid=_FACTOR_GRID, target="custom_exp:a=1")
_identity("eta_m", "direct Mellin transform of a mixture psi vs "
          "(1/2) pi^(-s/2) Gamma(s/2) zeta(s) xi_1(s)",
          lambda t: ((lambda s: M.eta_direct(series_for(t), s)),
                     lambda s: M.eta_mixture_closed(mixing_family(t), s)),
          grid=_points(1.5, 2, 3, 4, complex(2, 2), complex(1.5, 10)), target="gig:a=1")
_identity("mellin_consistency", "s(s-1) eta_direct vs the split-integral xi",
          lambda t: ((lambda s: s * (s - 1.0) * M.eta_direct(series_for(t), s)), _psi_xi(t)),
          grid=_points(1.5, 2, 3, complex(2, 2)), tol=1e-8, target="gaussian")


def _functional_equation(selector):
    xi = xi_function(selector or "riemann")
    return residual_functional_equation(xi)


def residual_functional_equation(xi: M.XiFunction) -> Residual:
    def residual(s: complex) -> float:
        if s == 1.0 - s:
            return 0.0
        return abs(xi(s) - xi(1.0 - s))

    return residual


register(CheckDef("functional_equation", "|Xi(s) - Xi(1-s)| for a selected xi function",
                  _functional_equation, standard_grid, TOL_CLOSED, "riemann", kind="property"))


def _sr_residual(f: D.SRDensity) -> Residual:
    def residual(t: complex) -> float:
        t = t.real
        if t < 0:
            raise ConfigError("self-reciprocity grid must lie in [0, inf)")
        return abs(float(D.density_cf(f, t)) - D.SQRT_2PI * float(D.mixture_pdf(f, t)))

    return residual


register(CheckDef("self_reciprocal", "|cf(t) - sqrt(2 pi) pdf(t)|; grid points are t",
                  lambda t: _sr_residual(sr_density(t)), lambda: real_grid(0.0, 5.0, 0.25), 1e-8, "levy:lam=1",
                  kind="property"))

_X_GRID = _points(0.125, 0.5, 1, 2, 8)
register(CheckDef("theta_modular", "theta(x) - theta(1/x)/x; grid points are x",
                  lambda t: (lambda x, ts=series_for(t): abs(theta_modular_residual(ts, x.real))),
                  _X_GRID, 1e-10, "gaussian", kind="property"))
register(CheckDef("psi_reflection", "psi(x) - psi(1/x)/x - 1/(2x) + 1/2; grid points are x",
                  lambda t: (lambda x, ts=series_for(t): abs(psi_reflection_residual(ts, x.real))),
                  _X_GRID, 1e-10, "gaussian", kind="property"))
register(CheckDef("poisson_density", "density-side Poisson summation residual; grid points are x",
                  lambda t: (lambda x, f=sr_density(t): abs(poisson_density_residual(f, x.real))),
                  _X_GRID, 1e-10, "gaussian", kind="property"))


# --- checks and reports -----------------------------------------------------------


@dataclass(frozen=True)
class CheckSpec:
    """A registered check with its target, grid and tolerance resolved."""

    name: str
    target: str | None = None
    grid: SGrid | None = None
    tolerance: float | None = None

    def __post_init__(self):
        if self.name not in REGISTRY:
            raise ConfigError(f"unknown check {self.name!r}")
        d = REGISTRY[self.name]
        if self.target is None:
            object.__setattr__(self, "target", d.default_target)
        if self.grid is None:
            object.__setattr__(self, "grid", d.default_grid())
        elif isinstance(self.grid, str):
            object.__setattr__(self, "grid", parse_grid(self.grid))
        if self.tolerance is None:
            object.__setattr__(self, "tolerance", d.default_tol)
        tol = float(self.tolerance)
        cap = math.inf if d.kind == "stochastic" else MAX_TOLERANCE
        if not (0.0 < tol <= cap):
            raise ConfigError(f"tolerance for {self.name} must lie in (0, {cap:g}], got {tol:g}")
        object.__setattr__(self, "tolerance", tol)

    @property
    def label(self) -> str:
        return self.name if self.target is None else f"{self.name}[{self.target}]"


@dataclass(frozen=True)
class VerificationReport:
    check: CheckSpec
    points: tuple
    residuals: tuple
    wall_ms: float = 0.0
    errors: tuple = ()
    note: str = ""
    max_residual: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        if len(self.points) != len(self.residuals):
            raise ValueError("one residual per grid point")
        res = tuple(math.inf if not r == r else float(r) for r in self.residuals)  # NaN -> inf
        object.__setattr__(self, "residuals", res)
        worst = max(res) if res else 0.0
        object.__setattr__(self, "max_residual", worst)
        object.__setattr__(self, "passed", worst < self.check.tolerance)

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "check": self.check.label,
            "grid": self.check.grid.description,
            "tolerance": self.check.tolerance,
            "points": [{"s_re": p.real, "s_im": p.imag, "residual": r}
                       for p, r in zip(self.points, self.residuals)],
            "max_residual": self.max_residual,
            "passed": self.passed,
            "wall_ms": round(self.wall_ms, 3) if timing else None,
        }
        if self.errors:
            d["errors"] = [{"index": i, "message": m} for i, m in self.errors]
        if self.note:
            d["note"] = self.note
        return d

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.check.label}: max residual {self.max_residual:.3e} "
                f"(tol {self.check.tolerance:.1e}, {len(self.points)} points)")


def thread_count() -> int:
    env = os.environ.get("SELFZETA_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"SELFZETA_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError("SELFZETA_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _safe(residual: Residual, s: complex):
    try:
        return float(residual(s)), None
    except (SelfZetaError, ArithmeticError, ValueError) as exc:
        return math.inf, f"{type(exc).__name__}: {exc}"


def _evaluate(residual: Residual, points, pool) -> list:
    if pool is None:
        return [_safe(residual, s) for s in points]
    return list(pool.map(lambda s: _safe(residual, s), points))


def _run(spec: CheckSpec, residual: Residual, pool=None) -> VerificationReport:
    t0 = time.perf_counter()
    out = _evaluate(residual, spec.grid.points, pool)
    errors = tuple((i, msg) for i, (_, msg) in enumerate(out) if msg is not None)
    return VerificationReport(spec, spec.grid.points, tuple(r for r, _ in out),
                              wall_ms=1e3 * (time.perf_counter() - t0), errors=errors)


def _build(spec: CheckSpec) -> Residual:
    return REGISTRY[spec.name].build(spec.target)


def run_check(spec: CheckSpec, pool=None) -> VerificationReport:
    return _run(spec, _build(spec), pool)


def check_functional_equation(xi: M.XiFunction, grid: SGrid, tol: float = TOL_CLOSED) -> VerificationReport:
    spec = CheckSpec("functional_equation", getattr(xi, "label", "xi"), grid, tol)
    return _run(spec, residual_functional_equation(xi))


def check_identity(name: str, grid: SGrid | None = None, tol: float | None = None,
                   target: str | None = None) -> VerificationReport:
    if name not in REGISTRY or REGISTRY[name].kind != "identity":
        raise ConfigError(f"unknown identity {name!r}")
    return run_check(CheckSpec(name, target, grid, tol))


def check_self_reciprocal(f: str | D.SRDensity, t_grid: Iterable[float] | SGrid,
                          tol: float = 1e-8) -> VerificationReport:
    grid = t_grid if isinstance(t_grid, SGrid) else SGrid(tuple(complex(t) for t in t_grid), "t")
    if isinstance(f, str):
        return run_check(CheckSpec("self_reciprocal", f, grid, tol))
    return _run(CheckSpec("self_reciprocal", f.label, grid, tol), _sr_residual(f))


# --- suites -----------------------------------------------------------------------

_SR_TARGETS = ("gaussian", "cosh", "sinh_z", "cosh_h1", "cosh_t", "ggc_alpha:a=1,alpha=0.5",
               "gig:a=1", "levy:lam=1")


def default_suite() -> list[CheckSpec]:
    """Every registered check, with the acceptance targets."""
    specs = []
    for xi in ("riemann", "cosh", "xi4", "g3:a=0.5", "g3:a=1", "g3:a=2"):
        specs.append(CheckSpec("functional_equation", xi))
    for xi in ("psi:gaussian", "psi:cosh", "psi:gig:a=1"):
        specs.append(CheckSpec("functional_equation", xi, tolerance=TOL_PIPELINE))
    for name in ("gaussian_psi_xi", "cosh_psi_xi", "sinh_mixing_xi1", "sinh_mixture_xi", "h1_mixing_xi1",
                 "h1_mixture_xi", "cosh_t_mixing_xi1", "cosh_t_mixture_xi"):
        specs.append(CheckSpec(name))
    for a in ("0.5", "1", "2"):
        specs.append(CheckSpec("gig_mixing_xi1", f"gig:a={a}"))
    specs.append(CheckSpec("gig_mixture_xi"))
    specs.append(CheckSpec("ggc_normalizer"))
    for t in ("gig:a=1", "levy:lam=1", "cosh_t"):
        specs.append(CheckSpec("mixture_factorization", t))
    specs.append(CheckSpec("custom_mixture_factorization"))
    specs.append(CheckSpec("eta_m"))
    for t in ("gaussian", "cosh"):
        specs.append(CheckSpec("mellin_consistency", t))
    for t in _SR_TARGETS:
        specs.append(CheckSpec("self_reciprocal", t))
    for t in ("gaussian", "cosh"):
        specs.append(CheckSpec("theta_modular", t))
        specs.append(CheckSpec("psi_reflection", t))
        specs.append(CheckSpec("poisson_density", t))
    # Monte Carlo checks register themselves when selfzeta.montecarlo is imported
    for name in ("sr_empirical", "subordinated_variance"):
        if name in REGISTRY:
            specs += [CheckSpec(name, "gig:a=1"), CheckSpec(name, "cosh_t")]
    return specs


def _spec_from_mapping(item) -> CheckSpec:
    if isinstance(item, CheckSpec):
        return item
    if isinstance(item, str):
        name, _, target = item.partition("@")
        return CheckSpec(name.strip(), target.strip() or None)
    if isinstance(item, dict):
        unknown = set(item) - {"name", "target", "grid", "tolerance"}
        if unknown or "name" not in item:
            raise ConfigError(f"bad check entry {item!r}")
        return CheckSpec(item["name"], item.get("target"), item.get("grid"), item.get("tolerance"))
    raise ConfigError(f"bad check entry {item!r}")


def run_suite(config=None) -> list[VerificationReport]:
    """Run a list of checks and return reports in the declared order.

    ``config`` is ``None`` (the default suite), a list of CheckSpec / names /
    ``"name@target"`` strings / dicts, or a mapping with a ``checks`` key.
    Grid points of all checks share one thread pool of ``SELFZETA_THREADS``
    workers; results do not depend on the worker count.
    """
    if config is None:
        specs = default_suite()
    else:
        items = config.get("checks", []) if isinstance(config, dict) else config
        specs = [_spec_from_mapping(c) for c in items]
    residuals = [_build(s) for s in specs]
    n = thread_count()
    if n == 1 or not specs:
        return [_run(s, r) for s, r in zip(specs, residuals)]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return [_run(s, r, pool) for s, r in zip(specs, residuals)]
