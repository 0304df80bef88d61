from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import rank_grid_integral
from rankstab import (
    Interval,
    MetricKind,
    RankstabError,
    ball_boundary,
    d_dim,
    d_endpoint,
    d_rank,
    d_rank_p,
    d_to_diagonal,
    diagonal_distances,
    distance,
    pairwise_distances,
    rank_ball_corners,
)

METRICS = [MetricKind.rank(), MetricKind.rank(2), MetricKind.dim(), MetricKind.linf(), MetricKind.lp(1), MetricKind.lp(2)]

finite = st.floats(-100, 100, allow_nan=False)


@st.composite
def intervals(draw):
    b = draw(finite)
    length = draw(st.floats(0, 50, allow_nan=False))
    return Interval(b, b + length)


# -- interval -------------------------------------------------------------------


def test_interval_validation():
    with pytest.raises(RankstabError):
        Interval(2, 1)
    with pytest.raises(RankstabError):
        Interval(0, math.inf)
    assert Interval(1, 1).is_diagonal()
    assert Interval(0, 2).persistence == 2


# -- closed-form values ---------------------------------------------------------


@pytest.mark.parametrize(
    "x, y, expected",
    [((0, 2), (0, 2), 0.0), ((0, 2), (1, 3), 3.0), ((0, 1), (0, 2), 1.5), ((0, 2), (1, 1), 2.0)],
)
def test_d_rank_values(x, y, expected):
    assert d_rank(x, y) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("x, y, expected", [((0, 2), (1, 3), 2.0), ((0, 1), (2, 3), 2.0), ((0, 2), (0, 2), 0.0)])
def test_d_dim_values(x, y, expected):
    assert d_dim(x, y) == expected


def test_d_endpoint_values():
    assert d_endpoint((0, 2), (1, 3), math.inf) == 1
    assert d_endpoint((0, 2), (1, 3), 1) == 2
    assert d_endpoint((0, 2), (0, 2), 3) == 0


def test_d_rank_p_values():
    assert d_rank_p((0, 2), (1, 3), 1) == 3
    assert d_rank_p((0, 2), (1, 3), 2) == pytest.approx(math.sqrt(3), abs=1e-15)
    assert d_rank_p((0, 2), (0, 2), 2) == 0


def test_distance_to_diagonal():
    assert d_to_diagonal((0, 2), MetricKind.rank()) == 2
    assert d_to_diagonal((0, 2), MetricKind.linf()) == 1
    assert d_to_diagonal((0, 2), MetricKind.dim()) == 2
    for m in METRICS:
        assert d_to_diagonal((5, 5), m) == 0


def test_diagonal_distance_is_an_infimum():
    # d(x, diagonal) never exceeds d(x, (t, t)) and is attained
    x = Interval(-1.0, 2.5)
    ts = np.linspace(-3, 5, 4001)
    for m in METRICS:
        vals = [distance(x, (t, t), m) for t in ts]
        assert d_to_diagonal(x, m) <= min(vals) + 1e-12
        assert d_to_diagonal(x, m) == pytest.approx(min(vals), abs=1e-3)


# -- oracle agreement -----------------------------------------------------------


def test_d_rank_matches_grid_integration():
    rng = np.random.default_rng(11)
    for _ in range(200):
        b = rng.uniform(-5, 5, 2)
        d = b + rng.uniform(0, 1, 2) * (5 - b)
        x, y = (b[0], d[0]), (b[1], d[1])
        assert abs(rank_grid_integral(x, y) - d_rank(x, y)) <= 1e-2


@given(intervals(), intervals())
def test_inclusion_exclusion_identity(x, y):
    ov = max(0.0, min(x.death, y.death) - max(x.birth, y.birth))
    expected = 0.5 * x.persistence**2 + 0.5 * y.persistence**2 - ov**2
    assert d_rank(x, y) == pytest.approx(max(expected, 0.0), rel=1e-12, abs=1e-9)


@given(intervals(), intervals(), st.sampled_from([1.0, 2.0, 3.0, 7.5]))
def test_d_rank_p_is_a_root_of_d_rank(x, y, p):
    assert d_rank_p(x, y, p) == d_rank(x, y) ** (1 / p)


# -- metric axioms --------------------------------------------------------------


@settings(max_examples=300)
@given(intervals(), intervals(), intervals(), st.sampled_from(METRICS))
def test_metric_axioms(x, y, z, m):
    dxy = distance(x, y, m)
    assert dxy == distance(y, x, m)
    assert distance(x, x, m) == 0
    assert dxy >= 0
    assert distance(x, z, m) <= dxy + distance(y, z, m) + 1e-9 * max(1.0, dxy)


def test_rank_triangle_inequality_many_triples():
    rng = np.random.default_rng(5)
    n = 100_000
    P = []
    for _ in range(3):
        b = rng.uniform(-10, 10, n)
        P.append(np.column_stack([b, b + rng.exponential(3, n)]))
    ov = lambda A, B: np.maximum(0, np.minimum(A[:, 1], B[:, 1]) - np.maximum(A[:, 0], B[:, 0]))  # noqa: E731
    dr = lambda A, B: 0.5 * (A[:, 1] - A[:, 0]) ** 2 + 0.5 * (B[:, 1] - B[:, 0]) ** 2 - ov(A, B) ** 2  # noqa: E731
    x, y, z = P
    assert np.all(dr(x, z) <= dr(x, y) + dr(y, z) + 1e-9)
    # spot-check the vectorised helper against the scalar one
    D = pairwise_distances(x[:50], z[:50], MetricKind.rank())
    assert D[3, 7] == pytest.approx(d_rank(x[3], z[7]), abs=1e-12)


def test_pairwise_matches_scalar():
    rng = np.random.default_rng(1)
    X = np.sort(rng.uniform(0, 5, (6, 2)), axis=1)
    Y = np.sort(rng.uniform(0, 5, (4, 2)), axis=1)
    for m in METRICS:
        D = pairwise_distances(X, Y, m)
        for i in range(len(X)):
            for j in range(len(Y)):
                assert D[i, j] == pytest.approx(distance(X[i], Y[j], m), abs=1e-12)
        assert np.allclose(diagonal_distances(X, m), [d_to_diagonal(x, m) for x in X], atol=1e-12)


@pytest.mark.parametrize("c", [1e-3, 1.0, 1e3])
def test_rank_and_dim_are_not_bilipschitz(c):
    x = (0.0, c)
    ratio = d_to_diagonal(x, MetricKind.rank()) / d_to_diagonal(x, MetricKind.dim())
    assert ratio == pytest.approx(c / 2, rel=1e-15)


# -- balls ----------------------------------------------------------------------


def test_rank_ball_corners_example():
    corners = rank_ball_corners((0, 2), 1)
    expected = [(2 - math.sqrt(2), 2), (0, 2 + math.sqrt(6) - 2), (-(math.sqrt(6) - 2), 2), (0, math.sqrt(2))]
    assert np.allclose(corners, expected, atol=1e-12, rtol=0)


def test_four_samples_give_the_corners():
    P = ball_boundary((0, 2), 1, MetricKind.rank(), samples=4)
    assert np.allclose(P, rank_ball_corners((0, 2), 1), atol=1e-15, rtol=0)


@pytest.mark.parametrize("m", METRICS)
@pytest.mark.parametrize("center, r", [((0, 2), 1.0), ((0, 2), 0.3), ((1, 4), 2.0), ((0, 2), 3.0), ((1, 1), 1.0)])
def test_ball_points_lie_on_the_level_set(m, center, r):
    P = ball_boundary(center, r, m, samples=200)
    assert len(P) > 0
    assert np.all(P[:, 0] <= P[:, 1] + 1e-12)
    d = pairwise_distances(P, [center], m)[:, 0]
    assert np.max(np.abs(d - r)) <= 1e-6


def test_rank_ball_is_counterclockwise():
    P = ball_boundary((0, 2), 1, MetricKind.rank(), samples=400)
    x, y = P[:, 0], P[:, 1]
    signed_area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    assert signed_area > 0


def test_large_rank_radius_gives_open_curve():
    # r > l^2 / 2: the level set reaches the diagonal and is unbounded
    P = ball_boundary((0, 1), 2.0, MetricKind.rank(), samples=100)
    d = pairwise_distances(P, [(0, 1)], MetricKind.rank())[:, 0]
    assert np.allclose(d, 2.0, atol=1e-9)
    assert not np.allclose(P[0], P[-1])


def test_dim_ball_around_diagonal_point():
    P = ball_boundary((1, 1), 1, MetricKind.dim(), samples=400)
    assert np.allclose(P[:, 1] - P[:, 0], 1.0, atol=1e-12)


def test_ball_rejects_bad_arguments():
    with pytest.raises(RankstabError):
        ball_boundary((0, 2), 0, MetricKind.rank())
    with pytest.raises(RankstabError):
        ball_boundary((0, 2), 1, MetricKind.rank(), samples=3)


def nested_ball_violations(rng, n_points: int = 100_000) -> int:
    """Sample around a random centre and count points breaking the nested-ball radii."""
    b = rng.uniform(-3, 3)
    l = rng.uniform(0.1, 5)
    r = rng.uniform(0, 1) * min(l, l * l / 2)
    r = max(r, 1e-6)
    s = math.sqrt(l * l + 2 * r) - l
    t = l - math.sqrt(l * l - 2 * r)
    Y = np.array([b, b + l]) + rng.uniform(-1.5 * t, 1.5 * t, (n_points, 2))
    Y = Y[Y[:, 0] <= Y[:, 1]]
    dr = pairwise_distances(Y, [(b, b + l)], MetricKind.rank())[:, 0]
    dd = pairwise_distances(Y, [(b, b + l)], MetricKind.dim())[:, 0]
    eps = 1e-12 * max(1.0, l * l)
    bad = np.sum((dd <= s) & (dr > r + eps)) + np.sum((dr <= r) & (dd > t + eps))
    return int(bad)


def test_nested_balls():
    rng = np.random.default_rng(3)
    assert sum(nested_ball_violations(rng, 20_000) for _ in range(20)) == 0
