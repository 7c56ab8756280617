"""Anomaly scores (reconstruction error, LoMST, COF) and top-N flagging."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .data_io import LabelVector
from .graph import knn_index, prim_dense

METHODS = ("recon", "lomst", "cof")


@dataclass(frozen=True)
class ScoreVector:
    scores: np.ndarray
    method: str

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=float)
        if s.ndim != 1 or not np.all(np.isfinite(s)):
            raise ValueError("scores must be a finite 1-d vector")
        if self.method not in METHODS:
            raise ValueError(f"unknown scoring method {self.method!r}")
        object.__setattr__(self, "scores", s)

    def __len__(self):
        return self.scores.shape[0]


def _values(x):
    return np.asarray(getattr(x, "values", x), dtype=float)


def recon_scores(x, x_prime) -> ScoreVector:
    """Squared Euclidean distance between each row and its reconstruction."""
    v, vp = _values(x), _values(x_prime)
    if v.shape != vp.shape:
        raise ValueError(f"shape mismatch: {v.shape} vs {vp.shape}")
    return ScoreVector(np.sum((v - vp) ** 2, axis=1), "recon")


def _local_prim(v, members):
    pts = v[members]
    return prim_dense(cdist(pts, pts))


def lomst_scores(x, k: int = 15) -> ScoreVector:
    """Local MST total length of each point with its k-NN, minus the neighbors' mean."""
    v = _values(x)
    nn = knn_index(v, k)
    total = np.empty(v.shape[0])
    for i in range(v.shape[0]):
        _, _, edge_w = _local_prim(v, np.concatenate(([i], nn[i])))
        total[i] = math.fsum(edge_w)
    # mean of differences, so equal totals give exactly zero
    return ScoreVector((total[:, None] - total[nn]).mean(axis=1), "lomst")


def chaining_distances(x, k: int):
    """Average chaining distance of every point over itself and its k-NN.

    The set-based nearest path grown from the point is exactly the insertion
    order of Prim's algorithm started there; the l-th trail edge is weighted
    by 2(k+1-l) / (k(k+1)).
    """
    v = _values(x)
    nn = knn_index(v, k)
    weights = 2.0 * (k + 1 - np.arange(1, k + 1)) / (k * (k + 1))
    ac = np.empty(v.shape[0])
    for i in range(v.shape[0]):
        _, _, edge_w = _local_prim(v, np.concatenate(([i], nn[i])))
        ac[i] = np.dot(weights, edge_w[1:])
    return ac, nn


def cof_scores(x, k: int = 15) -> ScoreVector:
    """Connectivity outlier factor: ac-dist(i) over the mean ac-dist of i's neighbors.

    A zero neighbor mean gives 1.0 when the point's own ac-dist is also zero
    and ``ac / 1e-12`` otherwise, keeping scores finite.
    """
    ac, nn = chaining_distances(x, k)
    nbr = ac[nn].mean(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        score = np.where(nbr > 0, ac / np.where(nbr > 0, nbr, 1.0), np.where(ac > 0, ac / 1e-12, 1.0))
    return ScoreVector(score, "cof")


def score(method: str, x, x_prime=None, k: int = 15) -> ScoreVector:
    if method == "recon":
        return recon_scores(x, x_prime)
    if method == "lomst":
        return lomst_scores(x, k)
    if method == "cof":
        return cof_scores(x, k)
    raise ValueError(f"unknown scoring method {method!r}")


def flag_top_n(scores, n_flag: int) -> LabelVector:
    """Flag the ``n_flag`` largest scores; ties at the cut go to the smaller index."""
    s = np.asarray(getattr(scores, "scores", scores), dtype=float)
    m = s.shape[0]
    if not 1 <= n_flag <= m:
        raise ValueError(f"n_flag must lie in [1, {m}]")
    order = np.lexsort((np.arange(m), -s))
    flags = np.zeros(m, dtype=bool)
    flags[order[:n_flag]] = True
    return LabelVector(flags)


def ranking(scores) -> np.ndarray:
    """Indices from most to least anomalous."""
    s = np.asarray(getattr(scores, "scores", scores), dtype=float)
    return np.lexsort((np.arange(s.shape[0]), -s))
