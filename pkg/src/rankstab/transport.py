"""Exact Wasserstein distances between persistence diagrams.

The optimum over couplings is found by reducing to a square assignment
problem: each diagram is padded with one diagonal slot per point of the
other diagram.  Finite ``p`` minimises the sum of ``d**p`` with an
exact shortest-augmenting-path solver; ``p = inf`` minimises the largest
matched cost by binary search over candidate thresholds with a maximum
bipartite matching as the feasibility test.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from ._validation import RankstabError, UnsupportedError, check_order
from .diagram import Coupling, Diagram, _check_enumerable, _partial_injections, cost, split_signed
from .geometry import Interval, MetricKind, diagonal_distances, pairwise_distances

__all__ = [
    "TransportResult",
    "wasserstein",
    "wasserstein_distance",
    "wasserstein_signed",
    "wasserstein_bruteforce",
    "sorted_matching_distance",
]


@dataclass(frozen=True)
class TransportResult:
    distance: float
    optimal_coupling: Coupling


def _extended_cost(X: np.ndarray, Y: np.ndarray, m: MetricKind, p: float) -> np.ndarray:
    n, k = len(X), len(Y)
    C = np.full((n + k, k + n), np.inf)
    power = 1.0 if math.isinf(p) else p
    if n and k:
        C[:n, :k] = pairwise_distances(X, Y, m) ** power
    if n:
        C[np.arange(n), k + np.arange(n)] = diagonal_distances(X, m) ** power
    if k:
        C[n + np.arange(k), np.arange(k)] = diagonal_distances(Y, m) ** power
    C[n:, k:] = 0.0
    return C


def _assignment_to_coupling(X, Y, rows, cols) -> Coupling:
    n, k = len(X), len(Y)
    matched, left, right = [], [], []
    for i, j in zip(rows, cols):
        if i < n and j < k:
            matched.append((Interval(*X[i]), Interval(*Y[j])))
        elif i < n:
            left.append(Interval(*X[i]))
        elif j < k:
            right.append(Interval(*Y[j]))
    return Coupling(tuple(matched), tuple(left), tuple(right))


def _bottleneck_assignment(C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    size = C.shape[0]
    candidates = np.unique(C[np.isfinite(C)])
    lo, hi = 0, len(candidates) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        graph = csr_matrix((C <= candidates[mid]).astype(np.int8))
        match = maximum_bipartite_matching(graph, perm_type="column")
        if np.all(match >= 0):
            best = match
            hi = mid - 1
        else:
            lo = mid + 1
    assert best is not None  # the largest candidate always admits a perfect matching
    return np.arange(size), best


def wasserstein(alpha: Diagram, beta: Diagram, m: MetricKind, p: float = 1.0) -> TransportResult:
    """Exact ``p``-Wasserstein distance with ground metric ``m``.

    Parameters
    ----------
    alpha, beta : Diagram
        Ordinary diagrams (positive multiplicities).
    m : MetricKind
        Ground metric on intervals; points left unmatched pay their distance
        to the diagonal.
    p : float, default=1
        Order in ``[1, inf]``.

    Returns
    -------
    TransportResult
        The distance and one optimal coupling (ties broken arbitrarily).
    """
    p = check_order(p)
    if not (alpha.is_ordinary() and beta.is_ordinary()):
        raise UnsupportedError("signed diagrams need wasserstein_signed (p = 1 only)")
    X, Y = alpha.to_array(), beta.to_array()
    if len(X) + len(Y) == 0:
        return TransportResult(0.0, Coupling())
    C = _extended_cost(X, Y, m, p)
    if math.isinf(p):
        rows, cols = _bottleneck_assignment(C)
    else:
        rows, cols = linear_sum_assignment(C)
    gamma = _assignment_to_coupling(X, Y, rows, cols)
    return TransportResult(cost(gamma, m, p), gamma)


def wasserstein_distance(alpha: Diagram, beta: Diagram, m: MetricKind | None = None, p: float = 1.0) -> float:
    """Convenience wrapper returning only the distance (signed inputs allowed when ``p == 1``)."""
    m = MetricKind.rank() if m is None else m
    if not (alpha.is_ordinary() and beta.is_ordinary()):
        if check_order(p) != 1:
            raise UnsupportedError("signed diagrams are supported only for p = 1")
        return wasserstein_signed(alpha, beta, m)
    return wasserstein(alpha, beta, m, p).distance


def wasserstein_signed(alpha: Diagram, beta: Diagram, m: MetricKind) -> float:
    """1-Wasserstein distance between signed diagrams.

    The negative part of each side is moved to the other side:
    ``W1(alpha, beta) = W1(alpha_+ + beta_-, beta_+ + alpha_-)``.
    """
    a_pos, a_neg = split_signed(alpha)
    b_pos, b_neg = split_signed(beta)
    return wasserstein(a_pos + b_neg, b_pos + a_neg, m, 1.0).distance


def wasserstein_bruteforce(alpha: Diagram, beta: Diagram, m: MetricKind, p: float = 1.0) -> float:
    """Minimum coupling cost by exhaustive enumeration (at most 8 points per side)."""
    p = check_order(p)
    _check_enumerable(alpha, beta)
    X, Y = alpha.to_array(), beta.to_array()
    n, k = len(X), len(Y)
    D = pairwise_distances(X, Y, m).tolist()
    dx = diagonal_distances(X, m).tolist()
    dy = diagonal_distances(Y, m).tolist()
    best = math.inf
    for assignment in _partial_injections(n, k):
        parts = [dx[i] if j < 0 else D[i][j] for i, j in enumerate(assignment)]
        taken = set(assignment)
        parts += [dy[j] for j in range(k) if j not in taken]
        if not parts:
            value = 0.0
        elif math.isinf(p):
            value = max(parts)
        elif p == 1:
            value = math.fsum(parts)
        else:
            value = math.fsum(c**p for c in parts) ** (1.0 / p)
        best = min(best, value)
    return best


def sorted_matching_distance(alpha: Diagram, beta: Diagram, m: MetricKind) -> float:
    """Cost of matching two free-module diagrams in increasing birth order.

    Every interval of ``alpha`` must end at one common value, likewise for
    ``beta``, and both diagrams must have the same number of points.
    """
    X, Y = alpha.to_array(), beta.to_array()
    if len(X) != len(Y):
        raise RankstabError(f"diagrams have {len(X)} and {len(Y)} points; equal sizes required")
    for name, Z in (("left", X), ("right", Y)):
        if len(Z) and np.any(Z[:, 1] != Z[0, 1]):
            raise RankstabError(f"{name} diagram does not have a common death value")
    if not len(X):
        return 0.0
    X = X[np.argsort(X[:, 0], kind="stable")]
    Y = Y[np.argsort(Y[:, 0], kind="stable")]
    D = pairwise_distances(X, Y, m)
    return math.fsum(np.diagonal(D))
