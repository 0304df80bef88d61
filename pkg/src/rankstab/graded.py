"""Rank functions on a finite grid, Moebius inversion and graded diagrams.

On a grid ``r_0 < r_1 < ... < r_m`` the rank function of a diagram is the
integer matrix ``rank[i, j]`` (``i <= j``) counting the points ``(b, d)``
with ``b <= r_i`` and ``r_j <= d``.  Inverting it over the poset of grid
intervals ordered by inclusion recovers the diagram through the four-term
difference

    rank[i, j] - rank[i-1, j] - rank[i, j+1] + rank[i-1, j+1]

with out-of-range entries read as zero.  Thresholding the rank function at
level ``k`` and inverting gives the ``k``-th graded diagram, a signed
diagram with multiplicities in ``{-1, +1}``; the graded diagrams sum to the
original one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import TOL, ParseError, RankstabError, UnsupportedError
from .diagram import Diagram, format_diagram, parse_diagram
from .geometry import MetricKind
from .landscape import l1_distance, landscape_of
from .report import Report
from .transport import wasserstein, wasserstein_signed

__all__ = [
    "CriticalGrid",
    "RankFunction",
    "critical_grid",
    "rank_function_of",
    "graded_rank",
    "diagram_from_ranks",
    "graded_diagrams",
    "verify_graded_stability",
    "format_graded_diagrams",
    "parse_graded_diagrams",
]


@dataclass(frozen=True)
class CriticalGrid:
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(x) for x in self.values)
        if len(vals) < 2 or any(b <= a for a, b in zip(vals, vals[1:])):
            raise RankstabError("grid values must be strictly increasing with at least two entries")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def index(self, x: float) -> int:
        i = int(np.searchsorted(self.values, x))
        if i == len(self.values) or self.values[i] != x:
            raise RankstabError(f"value {x!r} is not on the grid")
        return i


def critical_grid(*diagrams: Diagram, margin: float = 1.0) -> CriticalGrid:
    """Sorted endpoints of the diagrams plus one sentinel below and one above."""
    vals = sorted({x for dg in diagrams for iv, _ in dg for x in (iv.birth, iv.death)})
    if not vals:
        return CriticalGrid((0.0, margin))
    return CriticalGrid(tuple([vals[0] - margin] + vals + [vals[-1] + margin]))


@dataclass(frozen=True)
class RankFunction:
    """Integer rank values on grid intervals; ``values[i, j]`` for ``i <= j``.

    Entries below the diagonal are unused and kept at zero.
    """

    grid: CriticalGrid
    values: np.ndarray

    def __post_init__(self):
        n = len(self.grid)
        vals = np.asarray(self.values, dtype=np.int64)
        if vals.shape != (n, n):
            raise RankstabError(f"rank matrix has shape {vals.shape}, expected {(n, n)}")
        vals = np.triu(vals)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __call__(self, r: float, s: float) -> int:
        return int(self.values[self.grid.index(r), self.grid.index(s)])

    def max(self) -> int:
        return int(self.values.max(initial=0))

    def __eq__(self, other):
        if not isinstance(other, RankFunction):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.values, other.values)

    def __add__(self, other: "RankFunction") -> "RankFunction":
        if self.grid != other.grid:
            raise RankstabError("rank functions live on different grids")
        return RankFunction(self.grid, self.values + other.values)


def rank_function_of(alpha: Diagram, grid: CriticalGrid | None = None) -> RankFunction:
    """Count, for every grid interval ``[r_i, r_j]``, the points of ``alpha`` containing it."""
    if not alpha.is_ordinary():
        raise UnsupportedError("rank functions are defined for ordinary diagrams")
    grid = critical_grid(alpha) if grid is None else grid
    r = np.asarray(grid.values)
    vals = np.zeros((len(r), len(r)), dtype=np.int64)
    for iv, mult in alpha:
        i0, j0 = grid.index(iv.birth), grid.index(iv.death)
        # [r_i, r_j] inside [b, d] iff i >= i0 and j <= j0
        vals[i0:j0 + 1, i0:j0 + 1] += mult
    return RankFunction(grid, vals)


def graded_rank(rf: RankFunction, k: int) -> RankFunction:
    """Indicator of ``rank >= k``."""
    if k < 1:
        raise RankstabError("grades start at 1")
    return RankFunction(rf.grid, (rf.values >= k).astype(np.int64))


def diagram_from_ranks(rf: RankFunction) -> Diagram:
    """Moebius inversion of a rank function on its grid (possibly signed)."""
    R = np.triu(rf.values)
    n = R.shape[0]
    P = np.zeros((n + 1, n + 1), dtype=np.int64)
    # P[i + 1, j] = R[i, j]; row 0 and column n are the zero padding
    P[1:, :n] = R
    M = P[1:, :n] - P[:-1, :n] - P[1:, 1:] + P[:-1, 1:]
    M = np.triu(M)
    vals = rf.grid.values
    return Diagram((vals[i], vals[j], int(M[i, j])) for i, j in zip(*np.nonzero(M)))


def graded_diagrams(alpha: Diagram) -> list[Diagram]:
    """Graded diagrams ``[alpha^(1), ..., alpha^(N)]`` with ``N`` the largest rank."""
    rf = rank_function_of(alpha)
    return [diagram_from_ranks(graded_rank(rf, k)) for k in range(1, rf.max() + 1)]


def verify_graded_stability(alpha: Diagram, beta: Diagram, m: MetricKind | None = None, tol: float = TOL) -> list[Report]:
    """Check that grading can only increase the 1-Wasserstein distance.

    Reports ``W1(alpha, beta) <= sum_k W1(alpha^(k), beta^(k))`` for the
    ground metric ``m`` and, for the rank metric, the landscape bound
    ``||L(alpha) - L(beta)||_1 <= sum_k W1(alpha^(k), beta^(k))``.
    """
    m = MetricKind.rank() if m is None else m
    ga, gb = graded_diagrams(alpha), graded_diagrams(beta)
    n = max(len(ga), len(gb))
    ga += [Diagram()] * (n - len(ga))
    gb += [Diagram()] * (n - len(gb))
    graded_sum = sum(wasserstein_signed(a, b, m) for a, b in zip(ga, gb))
    w1 = wasserstein(alpha, beta, m, 1).distance
    reports = [Report.check(f"graded sum bound [{m}]", w1, graded_sum, tol, f"grades={n}")]
    if m.kind == "rank" and m.p == 1:
        pl = l1_distance(landscape_of(alpha), landscape_of(beta))
        reports.append(Report.check("graded landscape bound", pl, graded_sum, tol, f"grades={n}"))
    return reports


def format_graded_diagrams(grades: list[Diagram]) -> str:
    """One stream of signed diagrams, each preceded by a ``# grade k`` line."""
    return "".join(f"# grade {k}\n" + format_diagram(dg) for k, dg in enumerate(grades, 1))


def parse_graded_diagrams(text: str, source: str = "<string>") -> list[Diagram]:
    blocks: list[list[str]] = []
    for raw in text.splitlines():
        if raw.strip().lower().startswith("# grade"):
            blocks.append([])
        elif blocks:
            blocks[-1].append(raw)
        elif raw.split("#", 1)[0].strip():
            raise ParseError(f"{source}: data before the first '# grade' line")
    return [parse_diagram("\n".join(b), f"{source} grade {k}") for k, b in enumerate(blocks, 1)]
