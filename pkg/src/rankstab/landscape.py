"""Persistence landscapes as exact piecewise-linear functions."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from ._validation import TOL, ParseError, UnsupportedError, format_real
from .diagram import Diagram
from .geometry import MetricKind
from .report import Report
from .transport import wasserstein

__all__ = [
    "PiecewiseLinear",
    "Landscape",
    "landscape_of",
    "l1_norm",
    "l1_distance",
    "verify_landscape_stability",
    "parse_landscape",
    "format_landscape",
    "read_landscape",
    "write_landscape",
]


@dataclass(frozen=True)
class PiecewiseLinear:
    """Compactly supported continuous piecewise-linear function.

    ``t`` is strictly increasing, ``values[0] == values[-1] == 0`` and the
    function vanishes outside ``[t[0], t[-1]]``.
    """

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("breakpoint arrays must be one-dimensional and of equal length")
        if len(t) and (np.any(np.diff(t) <= 0) or v[0] != 0 or v[-1] != 0 or np.any(v < 0)):
            raise ValueError("breakpoints must increase strictly, values must be nonnegative and vanish at both ends")
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        if not len(self.t):
            return np.zeros_like(np.asarray(x, dtype=float))
        return np.interp(x, self.t, self.values, left=0.0, right=0.0)

    def integral(self) -> float:
        if len(self.t) < 2:
            return 0.0
        return float(np.sum(np.diff(self.t) * (self.values[1:] + self.values[:-1])) / 2)

    def __eq__(self, other):
        if not isinstance(other, PiecewiseLinear):
            return NotImplemented
        return np.array_equal(self.t, other.t) and np.array_equal(self.values, other.values)

    def __repr__(self):
        pts = ", ".join(f"({format_real(a)}, {format_real(b)})" for a, b in zip(self.t, self.values))
        return f"PiecewiseLinear([{pts}])"


@dataclass(frozen=True)
class Landscape:
    """Landscape levels ``k = 1, 2, ...``; levels past the last one are zero."""

    levels: tuple[PiecewiseLinear, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.levels)

    def level(self, k: int) -> PiecewiseLinear:
        """Level ``k`` (1-based)."""
        if k < 1:
            raise IndexError("landscape levels are numbered from 1")
        if k > len(self.levels):
            return PiecewiseLinear(np.zeros(0), np.zeros(0))
        return self.levels[k - 1]

    def __call__(self, k: int, t):
        return self.level(k)(t)


def _simplify(t: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drop leading/trailing zero runs and interior points on a straight segment."""
    nz = np.nonzero(v > 0)[0]
    if not len(nz):
        return np.zeros(0), np.zeros(0)
    lo, hi = max(nz[0] - 1, 0), min(nz[-1] + 1, len(v) - 1)
    t, v = t[lo:hi + 1], v[lo:hi + 1]
    keep = [0]
    for i in range(1, len(t) - 1):
        j = keep[-1]
        # collinearity of (j, i, i+1): compare slopes
        s1 = (v[i] - v[j]) * (t[i + 1] - t[i])
        s2 = (v[i + 1] - v[i]) * (t[i] - t[j])
        scale = max(abs(s1), abs(s2), 1e-300)
        if abs(s1 - s2) > 1e-12 * scale:
            keep.append(i)
    keep.append(len(t) - 1)
    return t[keep], v[keep]


def landscape_of(alpha: Diagram) -> Landscape:
    """Exact landscape of an ordinary diagram.

    Level ``k`` at ``t`` is the ``k``-th largest tent value
    ``max(0, min(t - b, d - t))`` over the points ``(b, d)``.  Between
    consecutive candidates among the births, deaths and all midpoints
    ``(b_i + d_j) / 2`` no two tent pieces cross, so the ``k``-th largest is
    linear there and sampling at the candidates is exact.
    """
    if not alpha.is_ordinary():
        raise UnsupportedError("landscapes are defined for ordinary (unsigned) diagrams")
    X = alpha.to_array()
    X = X[X[:, 1] > X[:, 0]]
    if not len(X):
        return Landscape(())
    b, d = X[:, 0], X[:, 1]
    cand = np.unique(np.concatenate([b, d, ((b[:, None] + d[None, :]) / 2).ravel()]))
    tents = np.maximum(0.0, np.minimum(cand[None, :] - b[:, None], d[:, None] - cand[None, :]))
    tents = -np.sort(-tents, axis=0)
    levels = []
    for row in tents:
        t, v = _simplify(cand, row)
        if len(t):
            levels.append(PiecewiseLinear(t, v))
    return Landscape(tuple(levels))


def l1_norm(lam: Landscape) -> float:
    """Sum over levels of the integral of each level."""
    return math.fsum(f.integral() for f in lam.levels)


def _abs_integral(t: np.ndarray, h: np.ndarray) -> float:
    """Integral of ``|f|`` for the piecewise-linear ``f`` with values ``h`` at ``t``."""
    dt = np.diff(t)
    h0, h1 = h[:-1], h[1:]
    same = h0 * h1 >= 0
    area = np.where(same, dt * (np.abs(h0) + np.abs(h1)) / 2, 0.0)
    cross = ~same
    if np.any(cross):
        a0, a1 = np.abs(h0[cross]), np.abs(h1[cross])
        area[cross] = dt[cross] * (a0 * a0 + a1 * a1) / (2 * (a0 + a1))
    return math.fsum(area)


def l1_distance(lam: Landscape, mu: Landscape) -> float:
    """``sum_k integral |lam_k - mu_k|``, exact for piecewise-linear levels."""
    total = []
    for k in range(1, max(len(lam), len(mu)) + 1):
        f, g = lam.level(k), mu.level(k)
        t = np.union1d(f.t, g.t)
        if len(t) < 2:
            continue
        total.append(_abs_integral(t, f(t) - g(t)))
    return math.fsum(total)


def verify_landscape_stability(alpha: Diagram, beta: Diagram, tol: float = TOL) -> Report:
    """Compare ``||L(alpha) - L(beta)||_1`` with half the rank 1-Wasserstein distance."""
    lhs = l1_distance(landscape_of(alpha), landscape_of(beta))
    rhs = 0.5 * wasserstein(alpha, beta, MetricKind.rank(), 1).distance
    details = "equality" if abs(rhs - lhs) <= tol else ""
    return Report.check("landscape 1/2-Lipschitz", lhs, rhs, tol, details)


# -- text format -------------------------------------------------------------------


def format_landscape(lam: Landscape) -> str:
    blocks = []
    for f in lam.levels:
        blocks.append("".join(f"{format_real(a)} {format_real(b)}\n" for a, b in zip(f.t, f.values)))
    return "\n".join(blocks)


def parse_landscape(text: str, source: str = "<string>") -> Landscape:
    """Blocks of ``t value`` lines, one block per level, separated by blank lines."""
    levels, cur = [], []

    def flush():
        if cur:
            arr = np.array(cur, dtype=float)
            try:
                levels.append(PiecewiseLinear(arr[:, 0], arr[:, 1]))
            except ValueError as exc:
                raise ParseError(f"{source}: level {len(levels) + 1}: {exc}") from None
            cur.clear()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not raw.strip():
            flush()
            continue
        if not line:
            continue
        toks = line.split()
        if len(toks) != 2:
            raise ParseError(f"{source}:{lineno}: expected 't value', got {raw!r}")
        try:
            cur.append((float(toks[0]), float(toks[1])))
        except ValueError:
            raise ParseError(f"{source}:{lineno}: malformed number in {raw!r}") from None
    flush()
    return Landscape(tuple(levels))


def read_landscape(path: str | os.PathLike) -> Landscape:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_landscape(fh.read(), str(path))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def write_landscape(lam: Landscape, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_landscape(lam))
