"""Detection and clustering metrics, k-means, and trustworthiness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist


@dataclass(frozen=True)
class DetectionMetrics:
    precision: float
    recall: float
    f1: float
    true_positives: int
    false_positives: int
    false_negatives: int


@dataclass(frozen=True)
class ClusteringMetrics:
    nmi: float
    acc: float
    cluster_assignment: np.ndarray


def _bool(v):
    return np.asarray(getattr(v, "labels", v), dtype=bool)


def detection_metrics(predicted, truth) -> DetectionMetrics:
    """Confusion-count precision/recall/F1; zero denominators give 0."""
    pred, true = _bool(predicted), _bool(truth)
    if pred.shape != true.shape:
        raise ValueError(f"length mismatch: {pred.shape[0]} predictions vs {true.shape[0]} labels")
    tp = int(np.sum(pred & true))
    fp = int(np.sum(pred & ~true))
    fn = int(np.sum(~pred & true))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * tp / (2 * tp + fp + fn) if tp else 0.0
    return DetectionMetrics(precision, recall, f1, tp, fp, fn)


def _kmeans_pp(z, k, rng):
    m = z.shape[0]
    centers = [z[rng.integers(m)]]
    d2 = np.sum((z - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            # all remaining mass sits on chosen centers
            idx = rng.integers(m)
        else:
            idx = rng.choice(m, p=d2 / total)
        centers.append(z[idx])
        d2 = np.minimum(d2, np.sum((z - z[idx]) ** 2, axis=1))
    return np.array(centers)


def _lloyd(z, centers, max_iter=300, tol=1e-10):
    for _ in range(max_iter):
        d2 = cdist(z, centers, "sqeuclidean")
        labels = np.argmin(d2, axis=1)
        new = centers.copy()
        for c in range(centers.shape[0]):
            members = labels == c
            if members.any():
                new[c] = z[members].mean(axis=0)
        shift = np.max(np.abs(new - centers))
        centers = new
        if shift <= tol:
            break
    d2 = cdist(z, centers, "sqeuclidean")
    labels = np.argmin(d2, axis=1)
    return labels, float(d2[np.arange(z.shape[0]), labels].sum())


def kmeans(z, n_clusters: int, seed: int = 0, n_restarts: int = 10) -> np.ndarray:
    """Lloyd iterations from k-means++ seeds; the restart with least within-cluster SS wins."""
    z = np.asarray(z, dtype=float)
    m = z.shape[0]
    if not 2 <= n_clusters <= m:
        raise ValueError(f"n_clusters must lie in [2, {m}]")
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    if n_clusters == m:
        return np.arange(m)
    rng = np.random.default_rng(seed)
    best, best_wcss = None, np.inf
    for _ in range(n_restarts):
        labels, wcss = _lloyd(z, _kmeans_pp(z, n_clusters, rng))
        if wcss < best_wcss:
            best, best_wcss = labels, wcss
    return best


def within_cluster_ss(z, labels) -> float:
    z = np.asarray(z, dtype=float)
    return float(sum(np.sum((z[labels == c] - z[labels == c].mean(axis=0)) ** 2) for c in np.unique(labels)))


def contingency(a, b) -> np.ndarray:
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1))
    np.add.at(table, (ai, bi), 1)
    return table


def _entropy(counts):
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def nmi(assignment, truth, average: str = "arithmetic") -> float:
    """Mutual information normalized by the arithmetic (default), geometric, min or max entropy."""
    assignment, truth = np.asarray(assignment), np.asarray(truth)
    if assignment.shape != truth.shape:
        raise ValueError("length mismatch")
    c = contingency(assignment, truth)
    n = c.sum()
    pij = c / n
    pi = pij.sum(axis=1, keepdims=True)
    pj = pij.sum(axis=0, keepdims=True)
    nz = pij > 0
    mi = float(np.sum(pij[nz] * np.log(pij[nz] / (pi @ pj)[nz])))
    ha, hb = _entropy(c.sum(axis=1)), _entropy(c.sum(axis=0))
    if ha == 0 and hb == 0:
        return 1.0
    norm = {
        "arithmetic": (ha + hb) / 2,
        "geometric": np.sqrt(ha * hb),
        "min": min(ha, hb),
        "max": max(ha, hb),
    }[average]
    return float(mi / norm) if norm > 0 else 0.0


def cluster_accuracy(assignment, truth) -> float:
    """Fraction correct under the best one-to-one matching of clusters to classes."""
    c = contingency(assignment, truth)
    rows, cols = linear_sum_assignment(-c)
    return float(c[rows, cols].sum() / c.sum())


def clustering_metrics(assignment, truth, average: str = "arithmetic") -> ClusteringMetrics:
    assignment, truth = np.asarray(assignment), np.asarray(truth)
    if assignment.shape != truth.shape:
        raise ValueError(f"length mismatch: {assignment.shape[0]} vs {truth.shape[0]}")
    return ClusteringMetrics(nmi(assignment, truth, average), cluster_accuracy(assignment, truth), assignment)


def _rank_matrix(d):
    """``r[i, j]`` = rank of j among i's neighbors (1 = nearest), ties by smaller id."""
    m = d.shape[0]
    d = d.copy()
    np.fill_diagonal(d, -np.inf)
    order = np.argsort(d, axis=1, kind="stable")
    ranks = np.empty_like(order)
    ranks[np.arange(m)[:, None], order] = np.arange(m)[None, :]
    return ranks


def trustworthiness(x_high, z_low, k: int = 10) -> float:
    """1 - 2/(m k (2m - 3k - 1)) * sum over low-space k-neighbors j of i of max(0, r_high(i, j) - k)."""
    x = np.asarray(getattr(x_high, "values", x_high), dtype=float)
    z = np.asarray(z_low, dtype=float)
    m = x.shape[0]
    if z.shape[0] != m:
        raise ValueError("row counts differ")
    if not 1 <= k < m / 2:
        raise ValueError(f"k must satisfy 1 <= k < m/2 (k={k}, m={m})")
    ranks_high = _rank_matrix(cdist(x, x))
    dz = cdist(z, z)
    np.fill_diagonal(dz, np.inf)
    nn_low = np.argsort(dz, axis=1, kind="stable")[:, :k]
    r = ranks_high[np.arange(m)[:, None], nn_low]
    penalty = np.sum(np.maximum(r - k, 0))
    return float(1.0 - 2.0 / (m * k * (2 * m - 3 * k - 1)) * penalty)
