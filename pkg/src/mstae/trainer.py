"""Full-batch gradient-descent training under reconstruction + embedding loss."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import nn_core
from .graph import knn_index
from .intrinsic_dim import estimate_dimension, layer_plan
from .regularizer import RegularizerConfig, build_target, embedding_loss

DENOISE_KINDS = ("none", "gaussian", "neighbor")


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters.

    The loss is a sum over rows, so the gradient step uses
    ``learning_rate / m``; the same rate then works across data set sizes.
    """

    epochs: int = 500
    learning_rate: float = 0.1
    dropout_rate: float = 0.5
    regularizer: RegularizerConfig = field(default_factory=RegularizerConfig)
    denoise: str = "none"
    noise_std: float = 0.3
    denoise_k: int = 5
    n_hidden: int = 4
    latent_dim: Optional[int] = None  # None: two-NN estimate
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must lie in [0, 1)")
        if self.denoise not in DENOISE_KINDS:
            raise ValueError(f"denoise must be one of {DENOISE_KINDS}")
        if self.noise_std < 0:
            raise ValueError("noise_std must be nonnegative")
        if self.denoise_k < 1:
            raise ValueError("denoise_k must be >= 1")


@dataclass
class TrainRecord:
    recon_loss: np.ndarray
    embed_loss: np.ndarray
    total_loss: np.ndarray
    params: nn_core.NetworkParams
    latent: np.ndarray
    latent_dim: int


def corrupt(x, denoise: str = "none", noise_std: float = 0.3, knn=None, seed: int = 0) -> np.ndarray:
    """Corrupted copy of ``x``: unchanged, Gaussian-perturbed, or neighbor-averaged.

    For ``neighbor`` each row becomes the mean of the rows listed in ``knn``
    (the point itself is never in its own neighbor list).
    """
    v = np.asarray(getattr(x, "values", x), dtype=float)
    if denoise == "none":
        return v
    if denoise == "gaussian":
        return v + np.random.default_rng(seed).normal(0.0, noise_std, v.shape)
    if denoise == "neighbor":
        if knn is None:
            raise ValueError("neighbor corruption needs a k-NN table")
        knn = np.asarray(knn)
        if knn.shape[0] != v.shape[0]:
            raise ValueError("k-NN table does not match the data")
        return v[knn].mean(axis=1)
    raise ValueError(f"unknown denoise kind {denoise!r}")


def resolve_latent_dim(x, cfg: TrainConfig) -> int:
    d = np.asarray(getattr(x, "values", x)).shape[1]
    p = cfg.latent_dim if cfg.latent_dim is not None else estimate_dimension(x).p_hat
    return max(1, min(int(p), d))


def joint_loss(params, x_in, x_target, cfg: TrainConfig, target, dropout_seed=0, mode="train"):
    """Total loss, its parts, and parameter gradients for one full batch."""
    trace = nn_core.forward(params, x_in, cfg.dropout_rate, mode, dropout_seed)
    resid = trace.output - x_target
    recon = float(np.sum(resid * resid))
    g_val, g_grad = embedding_loss(trace.latent, cfg.regularizer, target)
    grads = nn_core.backward(trace, params, 2.0 * resid, g_grad)
    return recon + g_val, recon, g_val, grads, trace


def train(x, cfg: TrainConfig, reg_target=None, params: Optional[nn_core.NetworkParams] = None) -> TrainRecord:
    """Train an autoencoder on standardized ``x``.

    ``reg_target`` is the fixed regularizer target (distance or similarity
    matrix) from the uncorrupted data; it is built here when omitted. The
    network sees the corrupted input but is scored against the original.
    """
    v = np.asarray(getattr(x, "values", x), dtype=float)
    m, d = v.shape
    if reg_target is None and cfg.regularizer.mode != "none":
        reg_target = build_target(v, cfg.regularizer)

    seeds = np.random.default_rng(cfg.seed).integers(0, 2**63 - 1, size=2 * cfg.epochs + 1)
    p = resolve_latent_dim(v, cfg) if params is None else params.specs[params.latent_index].out_dim
    if params is None:
        params = nn_core.init_params(layer_plan(d, p, cfg.n_hidden), int(seeds[0]))

    knn = None
    if cfg.denoise == "neighbor":
        if not cfg.denoise_k < m:
            raise ValueError("denoise_k must be smaller than the number of rows")
        knn = knn_index(v, cfg.denoise_k)
    x_fixed = corrupt(v, cfg.denoise, cfg.noise_std, knn) if cfg.denoise != "gaussian" else None

    recon_hist = np.empty(cfg.epochs)
    embed_hist = np.empty(cfg.epochs)
    # overflow is caught by the explicit finiteness checks below
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(cfg.epochs):
            x_in = x_fixed if x_fixed is not None else corrupt(v, "gaussian", cfg.noise_std,
                                                               seed=int(seeds[2 * epoch + 1]))
            total, recon, g_val, grads, _ = joint_loss(params, x_in, v, cfg, reg_target, int(seeds[2 * epoch + 2]))
            if not np.isfinite(total):
                raise TrainingError(f"non-finite loss at epoch {epoch}")
            recon_hist[epoch] = recon
            embed_hist[epoch] = g_val
            params = params.step(grads, cfg.learning_rate / m)
            if not params.is_finite():
                raise TrainingError(f"non-finite parameters after epoch {epoch}")

    latent = nn_core.encode(params, v)
    return TrainRecord(recon_hist, embed_hist, recon_hist + embed_hist, params, latent, p)
