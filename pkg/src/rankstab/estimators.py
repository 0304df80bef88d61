"""scikit-learn style wrappers around the functional core.

Both transformers take a sequence of diagrams as ``X``; each item may be a
:class:`~rankstab.diagram.Diagram` or an ``(n, 2)`` / ``(n, 3)`` array of
``birth, death[, multiplicity]`` rows.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import RankstabError, check_order
from .diagram import Diagram
from .geometry import MetricKind
from .landscape import landscape_of
from .transport import wasserstein_distance

__all__ = ["check_diagrams", "LandscapeVectorizer", "PairwiseWasserstein"]


def check_diagrams(X, allow_signed: bool = False) -> list[Diagram]:
    """Validate a sequence of diagrams and convert every item to :class:`Diagram`."""
    if isinstance(X, (Diagram, np.ndarray)) and not (isinstance(X, np.ndarray) and X.dtype == object):
        raise RankstabError("expected a sequence of diagrams, got a single diagram")
    out = []
    for k, item in enumerate(X):
        if isinstance(item, Diagram):
            dg = item
        else:
            arr = np.asarray(item, dtype=float)
            if arr.size == 0:
                dg = Diagram()
            elif arr.ndim != 2 or arr.shape[1] not in (2, 3):
                raise RankstabError(f"diagram {k}: expected shape (n, 2) or (n, 3), got {arr.shape}")
            elif arr.shape[1] == 2:
                dg = Diagram.from_array(arr)
            else:
                mult = arr[:, 2]
                if np.any(mult != np.round(mult)):
                    raise RankstabError(f"diagram {k}: multiplicities must be integers")
                dg = Diagram.from_array(arr[:, :2], mult.astype(int))
        if not allow_signed and not dg.is_ordinary():
            raise RankstabError(f"diagram {k} has negative multiplicities")
        out.append(dg)
    return out


class LandscapeVectorizer(BaseEstimator, TransformerMixin):
    """Sample the first ``n_levels`` landscape levels on a uniform grid.

    Parameters
    ----------
    n_levels : int
        Number of levels kept; missing levels are zero.
    resolution : int
        Number of sample points per level.
    sample_range : tuple of float, optional
        Interval sampled.  When ``None`` it is learned in :meth:`fit` from
        the smallest birth and the largest death seen.

    Attributes
    ----------
    sample_range_ : tuple of float
    grid_ : ndarray of shape (resolution,)
    """

    def __init__(self, n_levels: int = 5, resolution: int = 100, sample_range=None):
        self.n_levels = n_levels
        self.resolution = resolution
        self.sample_range = sample_range

    def fit(self, X, y=None):
        dgms = check_diagrams(X)
        if self.n_levels < 1 or self.resolution < 2:
            raise RankstabError("n_levels must be >= 1 and resolution >= 2")
        if self.sample_range is not None:
            lo, hi = map(float, self.sample_range)
        else:
            pts = [dg.to_array() for dg in dgms if len(dg)]
            if pts:
                P = np.vstack(pts)
                lo, hi = float(P[:, 0].min()), float(P[:, 1].max())
            else:
                lo, hi = 0.0, 1.0
        if not hi > lo:
            hi = lo + 1.0
        self.sample_range_ = (lo, hi)
        self.grid_ = np.linspace(lo, hi, self.resolution)
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        dgms = check_diagrams(X)
        out = np.zeros((len(dgms), self.n_levels * self.resolution))
        for i, dg in enumerate(dgms):
            lam = landscape_of(dg)
            for k in range(1, self.n_levels + 1):
                out[i, (k - 1) * self.resolution:k * self.resolution] = lam(k, self.grid_)
        return out


class PairwiseWasserstein(BaseEstimator, TransformerMixin):
    """Distances from each input diagram to the diagrams seen in :meth:`fit`.

    The output of :meth:`transform` is an ``(n_samples, n_fitted)`` matrix,
    which can feed estimators that accept ``metric="precomputed"``.

    Parameters
    ----------
    metric : {"rank", "dim", "linf", "lp"}
    metric_p : float, optional
        Exponent of the ``rank`` or ``lp`` ground metric.
    p : float
        Wasserstein order; ``numpy.inf`` gives the bottleneck distance.
    """

    def __init__(self, metric: str = "rank", metric_p=None, p: float = 1.0):
        self.metric = metric
        self.metric_p = metric_p
        self.p = p

    def fit(self, X, y=None):
        self.metric_ = MetricKind.parse(self.metric, self.metric_p)
        self.p_ = check_order(self.p)
        self.fit_diagrams_ = check_diagrams(X, allow_signed=self.p_ == 1)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "fit_diagrams_")
        dgms = check_diagrams(X, allow_signed=self.p_ == 1)
        return _distance_matrix(dgms, self.fit_diagrams_, self.metric_, self.p_)


def _distance_matrix(A: Sequence[Diagram], B: Sequence[Diagram], m: MetricKind, p: float) -> np.ndarray:
    D = np.zeros((len(A), len(B)))
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            D[i, j] = wasserstein_distance(a, b, m, p)
    return D
