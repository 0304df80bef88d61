"""Metrics on interval modules and the geometry of their metric balls.

An interval module supported on ``[b, d]`` is identified with the point
``(b, d)`` of the closed half-plane ``b <= d``.  Four families of ground
metrics are provided:

``rank``
    The L1 distance between rank functions, i.e. the area of the symmetric
    difference of the triangles ``{(s, t) : b <= s <= t <= d}``.  The
    ``p``-variant integrates ``|rank I - rank J|**p`` which, since the
    integrand only takes values 0 and 1, is ``d_rank ** (1/p)``.
``dim``
    The length of the symmetric difference of the supports.
``linf`` / ``lp``
    The ``p``-norm of the endpoint difference vector.

Degenerate intervals ``b == d`` are treated as points of the diagonal: they
are all at distance zero from each other under ``rank`` and ``dim``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ._validation import RankstabError, check_order, check_real

__all__ = [
    "Interval",
    "MetricKind",
    "as_interval",
    "d_rank",
    "d_rank_p",
    "d_dim",
    "d_endpoint",
    "d_to_diagonal",
    "distance",
    "pairwise_distances",
    "diagonal_distances",
    "ball_boundary",
    "rank_ball_corners",
]


@dataclass(frozen=True, order=True)
class Interval:
    """Closed interval ``[birth, death]`` with ``birth <= death``."""

    birth: float
    death: float

    def __post_init__(self):
        b = check_real(self.birth, "birth")
        d = check_real(self.death, "death")
        if b > d:
            raise RankstabError(f"interval birth {b} exceeds death {d}")
        object.__setattr__(self, "birth", b)
        object.__setattr__(self, "death", d)

    @property
    def persistence(self) -> float:
        return self.death - self.birth

    def is_diagonal(self) -> bool:
        return self.birth == self.death

    def __iter__(self):
        yield self.birth
        yield self.death


IntervalLike = Union[Interval, Sequence[float]]


def as_interval(x: IntervalLike) -> Interval:
    if isinstance(x, Interval):
        return x
    b, d = x
    return Interval(b, d)


_KINDS = ("rank", "dim", "linf", "lp")


@dataclass(frozen=True)
class MetricKind:
    """Choice of ground metric on interval modules.

    Use the constructors :meth:`rank`, :meth:`dim`, :meth:`linf` and
    :meth:`lp` rather than building instances directly.
    """

    kind: str
    p: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise RankstabError(f"unknown metric kind {self.kind!r}; expected one of {_KINDS}")
        if self.kind == "rank":
            object.__setattr__(self, "p", check_order(self.p, "rank exponent", allow_inf=False))
        elif self.kind == "lp":
            object.__setattr__(self, "p", check_order(self.p, "endpoint norm exponent"))
        elif self.kind == "linf":
            object.__setattr__(self, "p", math.inf)
        else:
            object.__setattr__(self, "p", 1.0)

    @classmethod
    def rank(cls, p: float = 1.0) -> "MetricKind":
        return cls("rank", p)

    @classmethod
    def dim(cls) -> "MetricKind":
        return cls("dim")

    @classmethod
    def linf(cls) -> "MetricKind":
        return cls("linf")

    @classmethod
    def lp(cls, p: float) -> "MetricKind":
        return cls("lp", p)

    @classmethod
    def parse(cls, name: str, p: float | None = None) -> "MetricKind":
        """Build a metric from a CLI-style name (``rank``, ``dim``, ``linf``, ``lp``)."""
        name = name.lower()
        if name == "rank":
            return cls.rank(1.0 if p is None else p)
        if name == "dim":
            return cls.dim()
        if name in ("linf", "inf", "bottleneck"):
            return cls.linf()
        if name == "lp":
            if p is None:
                raise RankstabError("metric 'lp' needs an exponent")
            return cls.lp(p)
        raise RankstabError(f"unknown metric {name!r}")

    def __str__(self):
        if self.kind == "rank":
            return "rank" if self.p == 1 else f"rank(p={self.p:g})"
        if self.kind == "lp":
            return f"lp(p={self.p:g})"
        return self.kind


def _overlap(x: Interval, y: Interval) -> float:
    return max(min(x.death, y.death) - max(x.birth, y.birth), 0.0)


def d_rank(x: IntervalLike, y: IntervalLike) -> float:
    """Area of the symmetric difference of the triangles under ``x`` and ``y``.

    >>> d_rank((0, 2), (1, 3))
    3.0
    """
    x, y = as_interval(x), as_interval(y)
    lx, ly = x.persistence, y.persistence
    return max(0.5 * lx * lx + 0.5 * ly * ly - _overlap(x, y) ** 2, 0.0)


def d_rank_p(x: IntervalLike, y: IntervalLike, p: float) -> float:
    p = check_order(p, allow_inf=False)
    return d_rank(x, y) ** (1.0 / p)


def d_dim(x: IntervalLike, y: IntervalLike) -> float:
    """Length of the symmetric difference of the two supports."""
    x, y = as_interval(x), as_interval(y)
    return x.persistence + y.persistence - 2.0 * _overlap(x, y)


def d_endpoint(x: IntervalLike, y: IntervalLike, p: float) -> float:
    """``p``-norm of ``(x.birth - y.birth, x.death - y.death)``."""
    x, y = as_interval(x), as_interval(y)
    p = check_order(p)
    u, v = abs(x.birth - y.birth), abs(x.death - y.death)
    if math.isinf(p):
        return max(u, v)
    if p == 1:
        return u + v
    if p == 2:
        return math.hypot(u, v)
    return (u**p + v**p) ** (1.0 / p)


def d_to_diagonal(x: IntervalLike, m: MetricKind) -> float:
    """Distance from ``x`` to the diagonal (infimum over diagonal points)."""
    l = as_interval(x).persistence
    if m.kind == "rank":
        return (0.5 * l * l) ** (1.0 / m.p)
    if m.kind == "dim":
        return l
    if math.isinf(m.p):
        return 0.5 * l
    return 0.5 * l * 2.0 ** (1.0 / m.p)


def distance(x: IntervalLike, y: IntervalLike, m: MetricKind) -> float:
    if m.kind == "rank":
        d = d_rank(x, y)
        return d if m.p == 1 else d ** (1.0 / m.p)
    if m.kind == "dim":
        return d_dim(x, y)
    return d_endpoint(x, y, m.p)


def _as_points(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return X.reshape(0, 2)
    if X.ndim != 2 or X.shape[1] != 2:
        raise RankstabError(f"expected an (n, 2) array of intervals, got shape {X.shape}")
    return X


def pairwise_distances(X, Y, m: MetricKind) -> np.ndarray:
    """Matrix of ground distances between the rows of ``X`` and ``Y``.

    Parameters
    ----------
    X, Y : array-like of shape (n, 2) and (k, 2)
        Intervals as ``(birth, death)`` rows.
    m : MetricKind

    Returns
    -------
    ndarray of shape (n, k)
    """
    X, Y = _as_points(X), _as_points(Y)
    xb, xd = X[:, 0][:, None], X[:, 1][:, None]
    yb, yd = Y[:, 0][None, :], Y[:, 1][None, :]
    if m.kind in ("rank", "dim"):
        lx, ly = xd - xb, yd - yb
        ov = np.maximum(np.minimum(xd, yd) - np.maximum(xb, yb), 0.0)
        if m.kind == "dim":
            return lx + ly - 2.0 * ov
        D = 0.5 * lx * lx + 0.5 * ly * ly - ov * ov
        # cancellation can leave tiny negatives when x == y
        D = np.maximum(D, 0.0)
        return D if m.p == 1 else D ** (1.0 / m.p)
    u, v = np.abs(xb - yb), np.abs(xd - yd)
    if math.isinf(m.p):
        return np.maximum(u, v)
    if m.p == 1:
        return u + v
    return (u**m.p + v**m.p) ** (1.0 / m.p)


def diagonal_distances(X, m: MetricKind) -> np.ndarray:
    X = _as_points(X)
    l = X[:, 1] - X[:, 0]
    if m.kind == "rank":
        return (0.5 * l * l) ** (1.0 / m.p)
    if m.kind == "dim":
        return l
    if math.isinf(m.p):
        return 0.5 * l
    return 0.5 * l * 2.0 ** (1.0 / m.p)


# -- metric balls -----------------------------------------------------------


def rank_ball_corners(center: IntervalLike, r: float) -> list[tuple[float, float]]:
    """The four axis-aligned boundary points of the ``d_rank`` ball.

    Returned in counterclockwise order starting from the right corner:
    ``(x1 + t, x2), (x1, x2 + s), (x1 - s, x2), (x1, x2 - t)`` with
    ``s = sqrt(l^2 + 2r) - l`` and ``t = l - sqrt(l^2 - 2r)``.  Requires
    ``0 < r <= l^2 / 2``.
    """
    x = as_interval(center)
    l = x.persistence
    if not 0 < r <= 0.5 * l * l:
        raise RankstabError("corners exist only for 0 < r <= persistence**2 / 2")
    s = math.sqrt(l * l + 2 * r) - l
    t = l - math.sqrt(max(l * l - 2 * r, 0.0))
    x1, x2 = x.birth, x.death
    return [(x1 + t, x2), (x1, x2 + s), (x1 - s, x2), (x1, x2 - t)]


def _split_samples(extra: int, parts: int) -> list[int]:
    base, rem = divmod(extra, parts)
    return [base + (1 if i < rem else 0) for i in range(parts)]


def _rank_ball(x: Interval, r: float, samples: int) -> np.ndarray:
    x1, x2, l = x.birth, x.death, x.persistence
    if r <= 0.5 * l * l:
        right, top, left, bottom = rank_ball_corners(x, r)
        n_rh, n_line1, n_lh, n_line2 = _split_samples(samples - 4, 4)
        pts = [right]
        # right hyperbola: y2 = y1 + sqrt(2r + 2u^2 - l^2), u = x2 - y1
        for y1 in np.linspace(right[0], top[0], n_rh + 2)[1:-1]:
            u = x2 - y1
            pts.append((y1, y1 + math.sqrt(2 * r + 2 * u * u - l * l)))
        pts.append(top)
        # persistence grows to l + s along the upper-left edge
        for a in np.linspace(0.0, 1.0, n_line1 + 2)[1:-1]:
            pts.append((top[0] + a * (left[0] - top[0]), top[1] + a * (left[1] - top[1])))
        pts.append(left)
        # left hyperbola: y1 = y2 - sqrt(2r + 2u^2 - l^2), u = y2 - x1
        for y2 in np.linspace(left[1], bottom[1], n_lh + 2)[1:-1]:
            u = y2 - x1
            pts.append((y2 - math.sqrt(2 * r + 2 * u * u - l * l), y2))
        pts.append(bottom)
        for a in np.linspace(0.0, 1.0, n_line2 + 2)[1:-1]:
            pts.append((bottom[0] + a * (right[0] - bottom[0]), bottom[1] + a * (right[1] - bottom[1])))
        return np.array(pts, dtype=float)

    # Radius beyond the distance to the diagonal: the diagonal is inside the
    # ball and the level set is an unbounded curve.  Emit it from the lower
    # ray through both hyperbolas to the upper ray, rays truncated at length
    # max(l, c) where c is the persistence of the disjoint rays.
    c = math.sqrt(2 * r - l * l)
    s = math.sqrt(l * l + 2 * r) - l
    ray = max(l, c, 1.0)
    n_ray1, n_rh, n_line, n_lh, n_ray2 = _split_samples(max(samples - 6, 0), 5)
    pts = []
    # right ray: disjoint intervals to the right with persistence c
    for a in np.linspace(1.0, 0.0, n_ray1 + 2)[:-1]:
        pts.append((x2 + a * ray, x2 + a * ray + c))
    pts.append((x2, x2 + c))
    for y1 in np.linspace(x2, x1, n_rh + 2)[1:-1]:
        u = x2 - y1
        pts.append((y1, y1 + math.sqrt(2 * r + 2 * u * u - l * l)))
    top, left = (x1, x2 + s), (x1 - s, x2)
    if l > 0:
        pts.append(top)
    for a in np.linspace(0.0, 1.0, n_line + 2)[1:-1]:
        pts.append((top[0] + a * (left[0] - top[0]), top[1] + a * (left[1] - top[1])))
    if l > 0:
        pts.append(left)
    for y2 in np.linspace(x2, x1, n_lh + 2)[1:-1]:
        u = y2 - x1
        pts.append((y2 - math.sqrt(2 * r + 2 * u * u - l * l), y2))
    pts.append((x1 - c, x1))
    for a in np.linspace(0.0, 1.0, n_ray2 + 2)[1:]:
        pts.append((x1 - c - a * ray, x1 - a * ray))
    return np.array(pts, dtype=float)


def _norm_ball(x: Interval, r: float, m: MetricKind, samples: int) -> np.ndarray:
    # superellipse parametrisation of the endpoint-norm circle, counterclockwise
    # from the right corner; dim uses the l1 diamond
    p = 1.0 if m.kind == "dim" else m.p
    theta = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    c, s = np.cos(theta), np.sin(theta)
    if math.isinf(p):
        scale = np.maximum(np.abs(c), np.abs(s))
        u, v = c / scale, s / scale
    else:
        u = np.sign(c) * np.abs(c) ** (2.0 / p)
        v = np.sign(s) * np.abs(s) ** (2.0 / p)
        nrm = (np.abs(u) ** p + np.abs(v) ** p) ** (1.0 / p)
        u, v = u / nrm, v / nrm
    P = np.column_stack([x.birth + r * u, x.death + r * v])
    keep = P[:, 0] <= P[:, 1]
    if m.kind == "dim":
        # the diamond is the dim level set only where the intervals overlap
        d = pairwise_distances(P, [[x.birth, x.death]], m)[:, 0]
        keep &= np.abs(d - r) <= 1e-9 * max(1.0, r)
    return P[keep]


def ball_boundary(center: IntervalLike, r: float, m: MetricKind, samples: int = 64) -> np.ndarray:
    """Polyline tracing ``{y : d(center, y) = r}`` inside the half-plane ``y1 <= y2``.

    For the rank metric with ``r <= persistence**2 / 2`` the result is a
    closed curve (last point connects back to the first), traversed
    counterclockwise and made of two hyperbolic arcs and two segments of
    constant persistence; the four corners from :func:`rank_ball_corners`
    are always included, so ``samples=4`` returns exactly those.  For
    larger radii the level set is unbounded; the returned open polyline
    truncates its two rays.

    Other metrics return the points of the endpoint-norm circle (the l1
    diamond for ``dim``) that lie on the level set inside the half-plane.

    Returns
    -------
    ndarray of shape (k, 2) with rows ``(y1, y2)``.
    """
    x = as_interval(center)
    r = check_real(r, "radius")
    if r <= 0:
        raise RankstabError(f"radius must be positive, got {r}")
    if int(samples) != samples or samples < 4:
        raise RankstabError(f"samples must be an integer >= 4, got {samples}")
    samples = int(samples)
    if m.kind == "rank":
        # d_rank_p = d_rank ** (1/p), so the p-ball of radius r is the 1-ball of radius r**p
        return _rank_ball(x, r**m.p, samples)
    return _norm_ball(x, r, m, samples)
