"""Embedding losses on the latent matrix Z and their gradients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from . import graph
from .graph import GraphSimilarity

MODES = ("mst_mds", "mst_le", "gae", "euclidean_mds", "euclidean_le", "none")
NORM_EPS = 1e-12


@dataclass(frozen=True)
class RegularizerConfig:
    mode: str = "mst_le"
    lam: float = 1.0  # gae only
    weight: float = 1.0  # coefficient for the non-gae modes
    knn_k: int = 5
    bandwidth: Optional[float] = None
    zero_clamp: float = 1e-6

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown regularizer mode {self.mode!r}; choose from {MODES}")
        if self.mode == "gae" and not self.lam > 0:
            raise ValueError("gae mode requires lambda > 0")
        if self.lam < 0 or self.weight < 0:
            raise ValueError("regularizer coefficients must be nonnegative")


def loss_mds(z, m_dist):
    """sum_{i<j} (M_ij - |z_i - z_j|)^2 and its gradient."""
    z = np.asarray(z, dtype=float)
    m_dist = np.asarray(m_dist, dtype=float)
    d = cdist(z, z)
    diff = d - m_dist
    value = 0.5 * float(np.sum(diff * diff) - np.sum(np.diag(diff) ** 2))
    coef = 2.0 * diff / np.maximum(d, NORM_EPS)
    np.fill_diagonal(coef, 0.0)
    grad = coef.sum(axis=1)[:, None] * z - coef @ z
    return value, grad


def loss_le(z, sim: GraphSimilarity):
    """Quadratic form trace(Z^T L Z) = sum_{i<j} W_ij |z_i - z_j|^2, gradient 2 L Z."""
    z = np.asarray(z, dtype=float)
    lz = sim.laplacian @ z
    return float(np.sum(z * lz)), 2.0 * lz


def loss_le_pairwise(z, w):
    """Pair-sum evaluation of the same quantity as :func:`loss_le` (no Laplacian)."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    iu, ju = np.triu_indices(z.shape[0], k=1)
    sq = np.sum((z[iu] - z[ju]) ** 2, axis=1)
    return float(np.sum(w[iu, ju] * sq))


def loss_gae(z, sim: GraphSimilarity, lam: float):
    value, grad = loss_le(z, sim)
    return lam * value, lam * grad


def build_target(x, cfg: RegularizerConfig):
    """Distance matrix (MDS modes) or similarity (LE modes) built from ``x``."""
    mode = cfg.mode
    if mode == "none":
        return None
    if mode in ("mst_mds", "mst_le"):
        m_dist = graph.mst_distance_matrix(x)
        return m_dist if mode == "mst_mds" else graph.mst_similarity(m_dist, cfg.zero_clamp)
    if mode in ("euclidean_mds", "euclidean_le"):
        d = graph.pairwise_distances(x)
        return d if mode == "euclidean_mds" else graph.inverse_distance_similarity(d, cfg.zero_clamp)
    return graph.knn_heat_similarity(x, cfg.knn_k, cfg.bandwidth)


def embedding_loss(z, cfg: RegularizerConfig, target):
    """``(value, dG/dZ)`` for the configured mode; zero for ``none``."""
    if cfg.mode == "none":
        return 0.0, np.zeros_like(np.asarray(z, dtype=float))
    if cfg.mode == "gae":
        return loss_gae(z, target, cfg.lam)
    if cfg.mode.endswith("mds"):
        value, grad = loss_mds(z, target)
    else:
        value, grad = loss_le(z, target)
    return cfg.weight * value, cfg.weight * grad
