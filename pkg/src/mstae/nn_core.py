"""Feed-forward encoder/decoder with hand-derived backpropagation."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class ShapeError(ValueError):
    pass


ACTIVATIONS = ("sigmoid", "identity")


@dataclass(frozen=True)
class LayerSpec:
    in_dim: int
    out_dim: int
    activation: str = "sigmoid"

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise ShapeError("layer dimensions must be >= 1")
        if self.activation not in ACTIVATIONS:
            raise ShapeError(f"unknown activation {self.activation!r}")


@dataclass(frozen=True)
class NetworkParams:
    """Weights are stored ``out x in``; layers ``[0, n_encoder)`` form the encoder."""

    specs: tuple
    weights: tuple
    biases: tuple
    n_encoder: int

    @property
    def n_layers(self):
        return len(self.specs)

    @property
    def latent_index(self):
        return self.n_encoder - 1

    @property
    def encoder_layers(self):
        return list(zip(self.weights[: self.n_encoder], self.biases[: self.n_encoder]))

    @property
    def decoder_layers(self):
        return list(zip(self.weights[self.n_encoder:], self.biases[self.n_encoder:]))

    def is_finite(self) -> bool:
        return all(np.isfinite(a).all() for a in (*self.weights, *self.biases))

    def step(self, grads, lr):
        """New parameters after one plain gradient-descent step."""
        gw, gb = grads
        return NetworkParams(
            self.specs,
            tuple(w - lr * g for w, g in zip(self.weights, gw)),
            tuple(b - lr * g for b, g in zip(self.biases, gb)),
            self.n_encoder,
        )


@dataclass
class ForwardTrace:
    inputs: np.ndarray
    pre: list
    act: list
    masks: list
    latent_index: int

    @property
    def latent(self):
        return self.act[self.latent_index]

    @property
    def output(self):
        return self.act[-1]


def _check_chain(specs):
    for a, b in zip(specs, specs[1:]):
        if a.out_dim != b.in_dim:
            raise ShapeError(f"layer {a} does not chain into {b}")


def init_params(layer_specs, seed: int, n_encoder: int | None = None) -> NetworkParams:
    """Xavier-uniform weights on +-sqrt(6/(in+out)), zero biases."""
    specs = tuple(layer_specs)
    if not specs:
        raise ShapeError("need at least one layer")
    _check_chain(specs)
    if n_encoder is None:
        n_encoder = max(1, len(specs) // 2)
    if not 1 <= n_encoder <= len(specs):
        raise ShapeError("n_encoder out of range")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for s in specs:
        bound = np.sqrt(6.0 / (s.in_dim + s.out_dim))
        weights.append(rng.uniform(-bound, bound, (s.out_dim, s.in_dim)))
        biases.append(np.zeros(s.out_dim))
    return NetworkParams(specs, tuple(weights), tuple(biases), n_encoder)


def _sigmoid(a):
    # split form avoids overflow in exp for large |a|
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    e = np.exp(a[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def dropout_layers(params: NetworkParams):
    """Indices of layers whose outputs are subject to dropout."""
    skip = {params.latent_index, params.n_layers - 1}
    return [i for i in range(params.n_layers) if i not in skip]


def forward(params: NetworkParams, x, dropout_rate: float = 0.0, mode: str = "eval", seed: int = 0) -> ForwardTrace:
    x = np.asarray(getattr(x, "values", x), dtype=float)
    if x.ndim != 2 or x.shape[1] != params.specs[0].in_dim:
        raise ShapeError(f"input has shape {x.shape}, first layer expects {params.specs[0].in_dim} columns")
    if not 0.0 <= dropout_rate < 1.0:
        raise ValueError("dropout_rate must lie in [0, 1)")
    if mode not in ("train", "eval"):
        raise ValueError(f"unknown mode {mode!r}")
    train = mode == "train" and dropout_rate > 0
    rng = np.random.default_rng(seed) if train else None
    droppable = set(dropout_layers(params))

    pre, act, masks = [], [], []
    a = x
    for i, (spec, w, b) in enumerate(zip(params.specs, params.weights, params.biases)):
        z = a @ w.T + b
        h = _sigmoid(z) if spec.activation == "sigmoid" else z
        if train and i in droppable:
            mask = (rng.random(h.shape) >= dropout_rate) / (1.0 - dropout_rate)
        else:
            mask = np.ones_like(h)
        a = h * mask
        pre.append(z)
        act.append(a)
        masks.append(mask)
    return ForwardTrace(x, pre, act, masks, params.latent_index)


def encode(params: NetworkParams, x) -> np.ndarray:
    return forward(params, x, mode="eval").latent


def reconstruct(params: NetworkParams, x) -> np.ndarray:
    return forward(params, x, mode="eval").output


def backward(trace: ForwardTrace, params: NetworkParams, d_output, d_latent=None):
    """Gradients ``(dW list, db list)`` given dLoss/dX' and dLoss/dZ."""
    d_output = np.asarray(d_output, dtype=float)
    if d_output.shape != trace.output.shape:
        raise ShapeError(f"d_output shape {d_output.shape} != output shape {trace.output.shape}")
    if d_latent is not None:
        d_latent = np.asarray(d_latent, dtype=float)
        if d_latent.shape != trace.latent.shape:
            raise ShapeError(f"d_latent shape {d_latent.shape} != latent shape {trace.latent.shape}")

    n = params.n_layers
    gw, gb = [None] * n, [None] * n
    delta = d_output
    for i in range(n - 1, -1, -1):
        if i == params.latent_index and d_latent is not None:
            delta = delta + d_latent
        g = delta * trace.masks[i]
        if params.specs[i].activation == "sigmoid":
            s = _sigmoid(trace.pre[i])
            g = g * s * (1.0 - s)
        below = trace.act[i - 1] if i > 0 else trace.inputs
        gw[i] = g.T @ below
        gb[i] = g.sum(axis=0)
        if i > 0:
            delta = g @ params.weights[i]
    return gw, gb


def save_params(path, params: NetworkParams) -> None:
    """Write an ``.npz`` checkpoint.

    Keys: ``n_encoder``, ``activations`` (one string per layer), and
    ``W{i}`` / ``b{i}`` for each layer ``i`` (weights ``out x in``, row-major).
    """
    arrays = {f"W{i}": w for i, w in enumerate(params.weights)}
    arrays.update({f"b{i}": b for i, b in enumerate(params.biases)})
    np.savez(
        Path(path),
        n_encoder=np.array(params.n_encoder),
        activations=np.array([s.activation for s in params.specs]),
        **arrays,
    )


def load_params(path) -> NetworkParams:
    with np.load(Path(path)) as f:
        acts = [str(a) for a in f["activations"]]
        weights = tuple(f[f"W{i}"] for i in range(len(acts)))
        biases = tuple(f[f"b{i}"] for i in range(len(acts)))
        n_enc = int(f["n_encoder"])
    specs = tuple(LayerSpec(w.shape[1], w.shape[0], a) for w, a in zip(weights, acts))
    return NetworkParams(specs, weights, biases, n_enc)
