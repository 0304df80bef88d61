from __future__ import annotations

import numpy as np
import pytest

from oracles import poset_mobius_inversion
from rankstab import (
    CriticalGrid,
    Diagram,
    MetricKind,
    RankFunction,
    UnsupportedError,
    critical_grid,
    diagram_from_ranks,
    format_graded_diagrams,
    graded_diagrams,
    graded_rank,
    parse_graded_diagrams,
    rank_function_of,
    verify_graded_stability,
    wasserstein,
)
from rankstab.harness import random_diagram


def test_rank_function_examples():
    grid = CriticalGrid((-1, 0, 1, 2, 3))
    rf = rank_function_of(Diagram([(0, 2)]), grid)
    assert rf(0, 2) == 1 and rf(0, 3) == 0 and rf(-1, 2) == 0
    assert rank_function_of(Diagram(), grid).max() == 0
    rf2 = rank_function_of(Diagram([(0, 2), (1, 3)]), grid)
    assert rf2(1, 2) == 2


def test_rank_decreases_as_intervals_grow():
    rng = np.random.default_rng(1)
    for _ in range(50):
        rf = rank_function_of(random_diagram(rng, 10, grid=0.5))
        V = rf.values
        n = len(rf.grid)
        for i in range(n):
            for j in range(i, n):
                if i > 0:
                    assert V[i - 1, j] <= V[i, j]
                if j < n - 1:
                    assert V[i, j + 1] <= V[i, j]


def test_round_trip_examples():
    for a in [Diagram([(0, 2)]), Diagram([(0, 2), (1, 3)]), Diagram([(0, 2, 3), (0, 1)])]:
        assert diagram_from_ranks(rank_function_of(a)) == a
    grid = CriticalGrid((0, 1))
    assert diagram_from_ranks(RankFunction(grid, np.zeros((2, 2)))) == Diagram()


def test_round_trip_random():
    rng = np.random.default_rng(2)
    for _ in range(200):
        a = random_diagram(rng, 50, grid=0.5 if rng.uniform() < 0.5 else None)
        assert diagram_from_ranks(rank_function_of(a)) == a


def test_four_term_inversion_matches_poset_mobius():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = random_diagram(rng, 5, grid=1.0)
        rf = rank_function_of(a)
        expected = poset_mobius_inversion(rf.grid.values, rf)
        assert diagram_from_ranks(rf) == Diagram((b, d, m) for (b, d), m in expected.items())
        for k in range(1, rf.max() + 1):
            g = graded_rank(rf, k)
            expected = poset_mobius_inversion(g.grid.values, g)
            assert diagram_from_ranks(g) == Diagram((b, d, m) for (b, d), m in expected.items())


def test_graded_rank_examples():
    rf = rank_function_of(Diagram([(0, 2), (1, 3), (1, 2)]))
    assert np.array_equal(graded_rank(rf, 1).values, (rf.values >= 1).astype(int))
    assert graded_rank(rf, rf.max() + 1).max() == 0
    total = graded_rank(rf, 1)
    for k in range(2, rf.max() + 1):
        total = total + graded_rank(rf, k)
    assert total == rf


def test_graded_diagrams_of_two_overlapping_bars():
    g = graded_diagrams(Diagram([(0, 2), (1, 3)]))
    assert g == [Diagram([(0, 2), (1, 3), (1, 2, -1)]), Diagram([(1, 2)])]
    assert graded_diagrams(Diagram([(0, 2)])) == [Diagram([(0, 2)])]
    assert graded_diagrams(Diagram()) == []


def test_graded_diagrams_sum_and_signs():
    rng = np.random.default_rng(4)
    for _ in range(200):
        a = random_diagram(rng, 15, grid=0.5 if rng.uniform() < 0.5 else None)
        g = graded_diagrams(a)
        total = Diagram()
        for dg in g:
            assert all(m in (-1, 1) for _, m in dg)
            total = total + dg
        assert total == a


def test_graded_stability():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a, b = random_diagram(rng, 10, grid=0.5), random_diagram(rng, 10)
        for m in (MetricKind.rank(), MetricKind.dim()):
            assert all(r.passed for r in verify_graded_stability(a, b, m))


def test_graded_stability_trivial_cases():
    a = Diagram([(0, 2), (1, 3)])
    for r in verify_graded_stability(a, a):
        assert r.lhs == 0 and r.rhs == 0
    # disjoint bars: one grade, the bound is an equality
    a, b = Diagram([(0, 1), (2, 3)]), Diagram([(0, 1.5), (4, 5)])
    r = verify_graded_stability(a, b)[0]
    assert r.rhs == pytest.approx(wasserstein(a, b, MetricKind.rank()).distance, abs=1e-12)


def test_critical_grid_and_errors():
    g = critical_grid(Diagram([(0, 2)]), Diagram([(1, 3)]))
    assert g.values == (-1, 0, 1, 2, 3, 4)
    with pytest.raises(UnsupportedError):
        rank_function_of(Diagram([(0, 1, -1)]))
    with pytest.raises(ValueError):
        CriticalGrid((1, 1))


def test_graded_stream_round_trip():
    g = graded_diagrams(Diagram([(0, 2), (1, 3), (0.5, 2.5)]))
    text = format_graded_diagrams(g)
    assert text.startswith("# grade 1\n")
    assert parse_graded_diagrams(text) == g
    assert format_graded_diagrams(parse_graded_diagrams(text)) == text
