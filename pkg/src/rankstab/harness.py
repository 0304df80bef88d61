"""Random instance generators and verification suites.

Every suite is deterministic given a seed: trial ``k`` draws from
``numpy.random.default_rng(seed + k)``.
"""
from __future__ import annotations

import itertools
from typing import Callable, Iterator

import numpy as np

from ._validation import TOL, RankstabError
from .diagram import Diagram
from .filtration import WeightedComplex, verify_barcode_stability, verify_wp_stability
from .geometry import MetricKind
from .graded import verify_graded_stability
from .landscape import verify_landscape_stability
from .report import Report
from .transport import wasserstein

__all__ = [
    "random_diagram",
    "random_complex",
    "random_weight",
    "optimal_interval_witness",
    "summed_wp_witness",
    "SUITES",
    "run_suite",
]


def random_diagram(rng: np.random.Generator, max_points: int = 10, low: float = 0.0, high: float = 10.0,
                   min_points: int = 0, grid: float | None = None) -> Diagram:
    """Diagram with uniformly placed births and exponential-ish lengths.

    ``grid`` rounds endpoints to a lattice so that ties and repeated
    intervals occur.
    """
    n = int(rng.integers(min_points, max_points + 1))
    b = rng.uniform(low, high, n)
    l = rng.exponential((high - low) / 4, n)
    d = np.minimum(b + l, high + (high - low) / 2)
    if grid:
        b, d = np.round(b / grid) * grid, np.round(d / grid) * grid
    return Diagram((float(x), float(max(x, y))) for x, y in zip(b, d))


def random_complex(rng: np.random.Generator, max_cells: int = 30, bounds=(0.0, 1.0),
                   quantize: int | None = None) -> WeightedComplex:
    """Random simplicial complex (vertices, edges, triangles, tetrahedra) with a monotone weight.

    Cell ids are zero-padded strings so that they sort in creation order.
    """
    n_vertices = int(rng.integers(1, min(8, max_cells) + 1))
    simplices: list[tuple[int, ...]] = [(i,) for i in range(n_vertices)]
    present = set(simplices)
    for dim in (1, 2, 3):
        cands = [s for s in itertools.combinations(range(n_vertices), dim + 1)
                 if all(f in present for f in itertools.combinations(s, dim))]
        rng.shuffle(cands)
        keep = rng.uniform(0.3, 1.0)
        for s in cands:
            if len(simplices) >= max_cells:
                break
            if rng.uniform() < keep:
                simplices.append(s)
                present.add(s)
    name = {s: f"c{k:03d}" for k, s in enumerate(simplices)}
    cells = [(name[s], len(s) - 1, tuple(name[f] for f in itertools.combinations(s, len(s) - 1)) if len(s) > 1 else ())
             for s in simplices]
    K = WeightedComplex(cells, {name[s]: bounds[0] for s in simplices}, bounds)
    return K.with_weight(random_weight(rng, K, quantize))


def random_weight(rng: np.random.Generator, K: WeightedComplex, quantize: int | None = None) -> dict:
    """Monotone weight on ``K`` within its bounds.

    With ``quantize`` the values are drawn from ``quantize + 1`` equally
    spaced levels, which produces ties.
    """
    a, b = K.bounds
    w: dict = {}
    order = sorted(K.cells, key=lambda c: c.dim)
    for c in order:
        lo = max((w[f] for f, _ in c.boundary), default=a)
        if quantize:
            levels = np.linspace(a, b, quantize + 1)
            choices = levels[levels >= lo - 1e-15]
            x = float(rng.choice(choices)) if len(choices) else b
            x = max(x, lo)
        else:
            x = lo + (b - lo) * rng.uniform() ** 2
        w[c.id] = min(x, b)
    return w


def optimal_interval_witness(a: float = 0.0, b: float = 1.0):
    """Two weights on an edge between two vertices.

    The degree-0 diagrams contain ``(a, (a + b) / 2)`` and ``(a, b)``; the
    barcode inequality holds at horizon ``2b - a`` but fails for horizons
    close to ``b``.
    """
    K = WeightedComplex([("u", 0, ()), ("v", 0, ()), ("e", 1, ("u", "v"))],
                        {"u": a, "v": a, "e": (a + b) / 2}, (a, b))
    v = {"u": a, "v": a, "e": b}
    return K, K.weight, v


def summed_wp_witness():
    """Weights for which ``sum_i W_p`` exceeds ``||g_p||_p`` when ``p > 1``.

    A hollow triangle plus a disjoint edge, all at weight 0 under ``w``.
    Under ``v`` one triangle edge and the disjoint edge move to 1, so the
    degree-0 and degree-1 distances are ``0.5^(1/p)`` and ``1.5^(1/p)``
    while the free-module norm is ``3^(1/p)``.  Each per-degree inequality
    holds; the plain sum over degrees does not.
    """
    ids = ["u", "x", "y", "e1", "e2", "e3", "z", "t", "f"]
    K = WeightedComplex(
        [("u", 0, ()), ("x", 0, ()), ("y", 0, ()),
         ("e1", 1, ("u", "x")), ("e2", 1, ("x", "y")), ("e3", 1, ("u", "y")),
         ("z", 0, ()), ("t", 0, ()), ("f", 1, ("z", "t"))],
        {c: 0.0 for c in ids}, (0.0, 1.0))
    v = dict(K.weight)
    v["e3"] = v["f"] = 1.0
    return K, K.weight, v


# -- suites ------------------------------------------------------------------------


def _barcode_trial(rng) -> list[Report]:
    K = random_complex(rng, max_cells=int(rng.integers(1, 31)), quantize=int(rng.choice([0, 3, 6])) or None)
    v = random_weight(rng, K, quantize=int(rng.choice([0, 3, 6])) or None)
    return verify_barcode_stability(K, K.weight, v)


def _landscape_trial(rng) -> list[Report]:
    grid = 0.5 if rng.uniform() < 0.3 else None
    a = random_diagram(rng, 20, grid=grid)
    b = random_diagram(rng, 20, grid=grid)
    return [verify_landscape_stability(a, b)]


def _graded_trial(rng) -> list[Report]:
    grid = 0.5 if rng.uniform() < 0.5 else None
    a = random_diagram(rng, 10, grid=grid)
    b = random_diagram(rng, 10, grid=grid)
    m = MetricKind.rank() if rng.uniform() < 0.5 else MetricKind.dim()
    return verify_graded_stability(a, b, m)


def _coupling_trial(rng) -> list[Report]:
    m = [MetricKind.rank(), MetricKind.dim(), MetricKind.linf(), MetricKind.lp(2)][int(rng.integers(4))]
    a, b, s, t, g, e = (random_diagram(rng, 4) for _ in range(6))

    def W(x, y):
        return wasserstein(x, y, m, 1).distance

    return [
        Report.check(f"add [{m}]", W(a + s, b + t), W(a, b) + W(s, t)),
        Report.equality(f"match [{m}]", W(a + s, b + s), W(a, b), TOL * max(1.0, W(a, b))),
        Report.check(f"arithmetic [{m}]", W(a + t, b + e), W(a + g, b + s) + W(t + s, e + g)),
        Report.check(f"triangle [{m}]", W(a, g), W(a, b) + W(b, g)),
    ]


def _wp_trial(rng) -> list[Report]:
    K = random_complex(rng, max_cells=int(rng.integers(1, 21)))
    v = random_weight(rng, K)
    p = float(rng.choice([1, 2, 3]))
    return verify_wp_stability(K, K.weight, v, p)


SUITES: dict[str, Callable[[np.random.Generator], list[Report]]] = {
    "barcode": _barcode_trial,
    "landscape": _landscape_trial,
    "graded": _graded_trial,
    "coupling": _coupling_trial,
    "wp": _wp_trial,
}


def run_suite(name: str, seed: int = 0, trials: int = 100) -> Iterator[Report]:
    """Yield the reports of ``trials`` random trials of a suite."""
    if name not in SUITES:
        raise RankstabError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    trial = SUITES[name]
    for k in range(trials):
        yield from trial(np.random.default_rng(seed + k))
