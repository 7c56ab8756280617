"""Two-nearest-neighbor intrinsic dimension estimate and autoencoder layer sizing."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import knn_index
from .nn_core import LayerSpec


@dataclass(frozen=True)
class TwoNnStats:
    mu: np.ndarray  # sorted ascending
    f_emp: np.ndarray
    slope: float
    p_hat: int
    n_skipped: int = 0


def round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def estimate_dimension(x) -> TwoNnStats:
    """Slope of -log(1 - F(mu)) against log(mu), fit through the origin.

    ``mu_i = r2/r1`` from each point's first and second neighbor distances.
    Points with ``r1 = 0`` (exact duplicates) are left out, as is the largest
    order statistic whose ordinate is infinite.
    """
    v = np.asarray(getattr(x, "values", x), dtype=float)
    if v.shape[0] < 3:
        raise ValueError("two-NN estimation needs at least 3 points")
    _, dist = knn_index(v, 2, return_distance=True)
    r1, r2 = dist[:, 0], dist[:, 1]
    keep = r1 > 0
    if keep.sum() < 2:
        raise ValueError("no usable neighbor ratios (all points duplicated)")
    mu = np.sort(r2[keep] / r1[keep])
    m = mu.size
    f_emp = np.arange(1, m + 1) / m
    xs = np.log(mu[:-1])
    ys = -np.log(1.0 - f_emp[:-1])
    denom = float(np.dot(xs, xs))
    if denom == 0.0:
        raise ValueError("degenerate neighbor ratios (all equal to 1)")
    slope = float(np.dot(xs, ys) / denom)
    return TwoNnStats(mu, f_emp, slope, max(1, round_half_up(slope)), int((~keep).sum()))


def hidden_sizes(d: int, p: int, n_hidden: int) -> list[int]:
    """Widths of every layer after the input: encoder d -> p, decoder mirrored back to d."""
    if p > d:
        raise ValueError(f"latent width {p} exceeds input width {d}")
    if p < 1:
        raise ValueError("latent width must be >= 1")
    if n_hidden < 2 or n_hidden % 2:
        raise ValueError("n_hidden must be an even number >= 2")
    half = n_hidden // 2
    enc = [max(p, round_half_up(d - (k / half) * (d - p))) for k in range(1, half + 1)]
    enc[-1] = p
    return enc + enc[-2::-1] + [d]


def layer_plan(d: int, p: int, n_hidden: int = 4) -> list[LayerSpec]:
    """Sigmoid layers throughout except the linear output layer."""
    sizes = [d] + hidden_sizes(d, p, n_hidden)
    specs = []
    for k, (a, b) in enumerate(zip(sizes, sizes[1:])):
        last = k == len(sizes) - 2
        specs.append(LayerSpec(a, b, "identity" if last else "sigmoid"))
    return specs
