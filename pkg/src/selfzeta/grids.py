"""Evaluation grids in the complex s-plane and their text syntax.

Grid strings::

    real:a:b:step                      a, a+step, ..., up to b inclusive
    rect:re0:re1:im0:im1:n_re:n_im     n_re x n_im lattice, row-major in Im
    critline:t0:t1:n                   n points 1/2 + i t, t evenly spaced
    standard                           the default verification grid
    s1;s2;...                          explicit points, each "re" or "re,im"
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .specfun import as_complex

STANDARD_SEED = 20_231_107
STANDARD_RANDOM_POINTS = 26
CRITICAL_LINE_T = (1.0, 5.0, 10.0, 14.134725, 20.0, 30.0)


@dataclass(frozen=True)
class SGrid:
    """Ordered, nonempty, duplicate-free tuple of complex points."""

    points: tuple
    description: str = ""

    def __post_init__(self):
        pts = tuple(as_complex(p) for p in self.points)
        if not pts:
            raise ConfigError("grid must contain at least one point")
        if len(set(pts)) != len(pts):
            raise ConfigError(f"grid {self.description!r} has repeated points")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def real_grid(a: float, b: float, step: float) -> SGrid:
    if not step > 0 or b < a:
        raise ConfigError("real grid needs step > 0 and a <= b")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    pts = [complex(round(a + k * step, 12)) for k in range(n)]
    return SGrid(tuple(pts), f"real:{a:g}:{b:g}:{step:g}")


def rect_grid(re0: float, re1: float, im0: float, im1: float, n_re: int, n_im: int) -> SGrid:
    if n_re < 1 or n_im < 1:
        raise ConfigError("rect grid needs n_re, n_im >= 1")
    res = np.linspace(re0, re1, n_re) if n_re > 1 else np.array([re0])
    ims = np.linspace(im0, im1, n_im) if n_im > 1 else np.array([im0])
    pts = [complex(r, i) for i in ims for r in res]
    return SGrid(tuple(pts), f"rect:{re0:g}:{re1:g}:{im0:g}:{im1:g}:{n_re}:{n_im}")


def critline_grid(t0: float, t1: float, n: int) -> SGrid:
    if n < 1:
        raise ConfigError("critline grid needs n >= 1")
    ts = np.linspace(t0, t1, n) if n > 1 else np.array([t0])
    return SGrid(tuple(complex(0.5, t) for t in ts), f"critline:{t0:g}:{t1:g}:{n}")


def standard_grid() -> SGrid:
    """Integers -3..4, six critical-line points, and fixed-seed random points
    in the rectangle [-2, 3] x [0, 25]i (40 points in all)."""
    pts = [complex(k) for k in range(-3, 5)]
    pts += [complex(0.5, t) for t in CRITICAL_LINE_T]
    rng = np.random.Generator(np.random.Philox(STANDARD_SEED))
    re = rng.uniform(-2.0, 3.0, STANDARD_RANDOM_POINTS)
    im = rng.uniform(0.0, 25.0, STANDARD_RANDOM_POINTS)
    pts += [complex(r, i) for r, i in zip(re, im)]
    return SGrid(tuple(pts), "standard")


def _floats(parts, n, what):
    if len(parts) != n:
        raise ConfigError(f"{what} grid needs {n} fields, got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"bad number in {what} grid: {exc}") from None


def parse_point(text: str) -> complex:
    """``"0.5,14.1"`` -> ``0.5+14.1j``; a single number is real."""
    parts = [p.strip() for p in text.split(",")]
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"cannot parse point {text!r}") from None
    if len(vals) == 1:
        vals.append(0.0)
    if len(vals) != 2 or not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"point {text!r} must be 're' or 're,im' with finite parts")
    return complex(vals[0], vals[1])


def parse_grid(text: str) -> SGrid:
    text = text.strip()
    kind, _, rest = text.partition(":")
    parts = rest.split(":") if rest else []
    if kind == "standard" and not parts:
        return standard_grid()
    if kind == "real":
        return real_grid(*_floats(parts, 3, "real"))
    if kind == "rect":
        v = _floats(parts, 6, "rect")
        return rect_grid(v[0], v[1], v[2], v[3], int(v[4]), int(v[5]))
    if kind == "critline":
        v = _floats(parts, 3, "critline")
        return critline_grid(v[0], v[1], int(v[2]))
    pts = tuple(parse_point(p) for p in text.split(";") if p.strip())
    return SGrid(pts, text)
