"""Jacobi-type theta and psi series of a self-reciprocal density.

``theta(x) = sum_{n in Z} cf(sqrt(2 pi) x n)`` and ``psi(x) = sum_{n >= 1} ...``,
so ``theta = 1 + 2 psi``.  Self-reciprocity gives ``theta(x) = theta(1/x) / x``,
which the evaluators use below ``X_SWITCH`` (the direct series needs O(1/x)
terms there).  The ``*_residual`` functions never use that shortcut.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .density import SQRT_2PI, SRDensity, density_cf, mixture_pdf
from .errors import ConvergenceError, DomainError

X_SWITCH = 0.2
_BLOCK = 16


def _lattice_sum(func, x: np.ndarray, tol: float, n_cap: int) -> np.ndarray:
    """``sum_{n>=1} func(sqrt(2 pi) x n)`` for a non-increasing, non-negative ``func``.

    Stops once ``(n+1) * term <= tol / 10``, which bounds the tail for every
    decay profile met here (Gaussian, exponential, stretched exponential).
    """
    total = np.zeros_like(x)
    active = np.arange(x.size)
    n0 = 1
    while active.size:
        if n0 > n_cap:
            raise ConvergenceError(f"theta series reached n_cap={n_cap} at x={x[active].min():g}")
        n = np.arange(n0, min(n0 + _BLOCK, n_cap + 1))
        xa = x[active]
        t = SQRT_2PI * xa[:, None] * n[None, :]
        vals = np.asarray(func(t.ravel())).reshape(t.shape)
        total[active] += vals.sum(axis=1)
        last = vals[:, -1] * (n[-1] + 1)
        active = active[last > 0.1 * tol]
        n0 = n[-1] + 1
    return total


@dataclass(frozen=True, eq=False)
class ThetaSeries:
    """Theta/psi series attached to a self-reciprocal density."""

    source: SRDensity
    tol: float = 1e-13
    n_cap: int = 10_000
    _cache: dict = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        if not 0 < self.tol <= 1e-6:
            raise DomainError("tol must lie in (0, 1e-6]")
        if self.n_cap < 10:
            raise DomainError("n_cap must be at least 10")

    @property
    def label(self) -> str:
        return self.source.label

    def psi_direct(self, x) -> np.ndarray:
        """The psi series summed as written, with no reciprocal shortcut."""
        x = _positive(x)
        return _lattice_sum(lambda t: density_cf(self.source, t), x, self.tol, self.n_cap)

    def psi(self, x):
        x = _positive(x)
        out = np.empty_like(x)
        big = x >= X_SWITCH
        if np.any(big):
            out[big] = self.psi_direct(x[big])
        if np.any(~big):
            xs = x[~big]
            # psi(x) = psi(1/x)/x + 1/(2x) - 1/2
            out[~big] = self.psi_direct(1.0 / xs) / xs + (0.5 / xs - 0.5)
        return out

    def theta(self, x):
        return 1.0 + 2.0 * self.psi(x)

    def cached(self, key, compute):
        """Memoize ``compute()`` under ``key`` (used for psi on quadrature nodes)."""
        with self._lock:
            if key not in self._cache:
                self._cache[key] = compute()
            return self._cache[key]


def _positive(x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(x > 0)) or np.any(~np.isfinite(x)):
        raise DomainError("theta/psi need finite x > 0")
    return x


def _scalar(v):
    return float(v[0]) if np.ndim(v) and np.size(v) == 1 else v


def theta_series(f: SRDensity, tol: float = 1e-13, n_cap: int = 10_000) -> ThetaSeries:
    return ThetaSeries(f, tol, n_cap)


def theta(ts: ThetaSeries, x):
    """``theta(x) = 1 + 2 psi(x)``."""
    return _scalar(ts.theta(x))


def psi(ts: ThetaSeries, x):
    """``psi(x) = sum_{n>=1} cf(sqrt(2 pi) x n)``."""
    return _scalar(ts.psi(x))


def theta_modular_residual(ts: ThetaSeries, x):
    """``theta(x) - theta(1/x) / x`` with both sides summed directly."""
    x = _positive(x)
    lhs = 1.0 + 2.0 * ts.psi_direct(x)
    rhs = (1.0 + 2.0 * ts.psi_direct(1.0 / x)) / x
    return _scalar(lhs - rhs)


def psi_reflection_residual(ts: ThetaSeries, x):
    """``psi(x) - (psi(1/x)/x + 1/(2x) - 1/2)`` with both sides summed directly."""
    x = _positive(x)
    lhs = ts.psi_direct(x)
    rhs = ts.psi_direct(1.0 / x) / x + (0.5 / x - 0.5)
    return _scalar(lhs - rhs)


def poisson_density_residual(f: SRDensity, x, tol: float = 1e-13, n_cap: int = 10_000):
    """``sum_n f(sqrt(2 pi) x n) - (1/x) sum_n f(sqrt(2 pi) n / x)`` over all integers n.

    Uses the density itself rather than its characteristic function.
    """
    x = _positive(x)

    def pdf(t):
        return mixture_pdf(f, t)

    f0 = mixture_pdf(f, 0.0)
    # pdf = cf / sqrt(2 pi) so the same tail rule applies with tol scaled
    lhs = f0 + 2.0 * _lattice_sum(pdf, x, tol / SQRT_2PI, n_cap)
    rhs = (f0 + 2.0 * _lattice_sum(pdf, 1.0 / x, tol / SQRT_2PI, n_cap)) / x
    return _scalar(lhs - rhs)
