"""From-scratch multilayer perceptron used to fuse cluster readings.

Hidden layers use ReLU, the output layer is linear. Activations are kept as
column matrices ``(units, samples)`` so one forward/backward pass serves both
single readings and full batches.

The output error term is ``y - y_true``, i.e. the gradient of half the
squared error; batch gradients are averaged over samples.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, FusionError, ShapeError, StateError, TrainingError


@dataclass
class Mlp:
    layer_sizes: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        self.layer_sizes = [int(n) for n in self.layer_sizes]
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise ShapeError("need one weight matrix and bias vector per layer transition")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            want = (self.layer_sizes[k + 1], self.layer_sizes[k])
            if w.shape != want or b.shape != (want[0],):
                raise ShapeError(f"layer {k + 1}: weight {w.shape} / bias {b.shape}, expected {want}")

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    def copy(self) -> "Mlp":
        return Mlp(list(self.layer_sizes), [w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def is_finite(self) -> bool:
        return all(np.isfinite(w).all() and np.isfinite(b).all() for w, b in zip(self.weights, self.biases))

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Mlp":
        return cls(
            list(data["layer_sizes"]),
            [np.asarray(w, dtype=float) for w in data["weights"]],
            [np.asarray(b, dtype=float) for b in data["biases"]],
        )


@dataclass
class ForwardCache:
    net: Mlp
    zs: list[np.ndarray]
    activations: list[np.ndarray]  # activations[0] is the input


@dataclass
class Gradients:
    dW: list[np.ndarray]
    db: list[np.ndarray]


@dataclass
class TrainBatch:
    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        self.inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        self.targets = np.asarray(self.targets, dtype=float).reshape(-1)
        if len(self.inputs) < 1 or len(self.inputs) != len(self.targets):
            raise ShapeError(f"{len(self.inputs)} samples but {len(self.targets)} targets")


@dataclass
class TrainResult:
    net: Mlp
    loss_history: list[float] = field(default_factory=list)


def relu(z):
    return np.maximum(z, 0.0)


def relu_prime(z):
    return (z > 0).astype(float)


def init_weights(layer_sizes, seed) -> Mlp:
    """Glorot-uniform weights, zero biases."""
    sizes = [int(n) for n in layer_sizes]
    if len(sizes) < 2 or min(sizes) < 1:
        raise ConfigError(f"invalid layer sizes {layer_sizes!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(sizes, weights, biases)


def _forward_columns(net: Mlp, a: np.ndarray) -> ForwardCache:
    if a.shape[0] != net.input_size:
        raise ShapeError(f"input width {a.shape[0]} != network input size {net.input_size}")
    zs, acts = [], [a]
    last = len(net.weights) - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = w @ a + b[:, None]
        a = z if k == last else relu(z)
        zs.append(z)
        acts.append(a)
    return ForwardCache(net, zs, acts)


def forward(net: Mlp, x) -> tuple[float, ForwardCache]:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeError("forward() takes a single input vector; use forward_batch for matrices")
    cache = _forward_columns(net, x[:, None])
    return float(cache.activations[-1][0, 0]), cache


def forward_batch(net: Mlp, inputs) -> tuple[np.ndarray, ForwardCache]:
    """Rows of ``inputs`` are samples; returns one output per row."""
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    cache = _forward_columns(net, x.T)
    return cache.activations[-1][0].copy(), cache


def mse_loss(y, y_true) -> float:
    y = np.asarray(y, dtype=float).reshape(-1)
    t = np.asarray(y_true, dtype=float).reshape(-1)
    if y.shape != t.shape or y.size == 0:
        raise ShapeError(f"cannot compare predictions {y.shape} with targets {t.shape}")
    return float(np.mean((y - t) ** 2))


def backward(net: Mlp, cache: ForwardCache | None, y_true) -> Gradients:
    """Backpropagate from the output error; gradients are averaged over samples."""
    if cache is None or cache.net is not net:
        raise StateError("backward() needs the cache from a forward pass on this network")
    t = np.asarray(y_true, dtype=float).reshape(1, -1)
    y = cache.activations[-1]
    if t.shape[1] != y.shape[1]:
        raise ShapeError(f"{t.shape[1]} targets for {y.shape[1]} samples")
    m = y.shape[1]

    n_layers = len(net.weights)
    dW = [None] * n_layers
    db = [None] * n_layers
    delta = y - t  # linear output: derivative 1
    for k in range(n_layers - 1, -1, -1):
        dW[k] = delta @ cache.activations[k].T / m
        db[k] = delta.sum(axis=1) / m
        if k:
            delta = (net.weights[k].T @ delta) * relu_prime(cache.zs[k - 1])
    return Gradients(dW, db)


def sgd_step(net: Mlp, grads: Gradients, eta: float) -> Mlp:
    if len(grads.dW) != len(net.weights):
        raise ShapeError("gradient layer count does not match network")
    for w, g, b, gb in zip(net.weights, grads.dW, net.biases, grads.db):
        if w.shape != g.shape or b.shape != gb.shape:
            raise ShapeError(f"gradient shape {g.shape} does not match weight shape {w.shape}")
    return Mlp(
        list(net.layer_sizes),
        [w - eta * g for w, g in zip(net.weights, grads.dW)],
        [b - eta * g for b, g in zip(net.biases, grads.db)],
    )


def train(net: Mlp, batch: TrainBatch, eta: float = 0.01, epochs: int = 1000) -> TrainResult:
    """Full-batch gradient descent.

    ``loss_history[e]`` is the MSE before the update of epoch ``e``.
    """
    if epochs < 1:
        raise ConfigError(f"epochs must be >= 1, got {epochs!r}")
    if batch.inputs.shape[1] != net.input_size:
        raise ShapeError(f"batch has {batch.inputs.shape[1]} features, network expects {net.input_size}")
    history = []
    for epoch in range(epochs):
        # overflow is reported as TrainingError below, not as a numpy warning
        with np.errstate(over="ignore", invalid="ignore"):
            y, cache = forward_batch(net, batch.inputs)
            loss = mse_loss(y, batch.targets)
            if not math.isfinite(loss):
                raise TrainingError(f"training diverged at epoch {epoch}: loss={loss}", epoch=epoch)
            history.append(loss)
            net = sgd_step(net, backward(net, cache, batch.targets), eta)
        if not net.is_finite():
            raise TrainingError(f"non-finite parameters after epoch {epoch}", epoch=epoch)
    return TrainResult(net, history)


def pad_readings(readings, width: int) -> np.ndarray:
    """Right-pad with the readings' mean, or truncate, to ``width`` values."""
    r = np.asarray(readings, dtype=float).reshape(-1)
    if r.size == 0:
        raise FusionError("cannot fuse an empty set of readings")
    if r.size >= width:
        return r[:width].copy()
    return np.concatenate([r, np.full(width - r.size, r.mean())])


def fuse(net: Mlp, readings) -> float:
    y, _ = forward(net, pad_readings(readings, net.input_size))
    return y


@dataclass
class FusionModel:
    """A trained net plus the affine scaling between reading units and net units."""

    net: Mlp
    center: float = 0.0
    scale: float = 1.0

    def fuse(self, readings) -> float:
        r = np.asarray(readings, dtype=float)
        if r.size == 0:
            raise FusionError("cannot fuse an empty set of readings")
        return fuse(self.net, (r - self.center) / self.scale) * self.scale + self.center

    def to_dict(self) -> dict:
        return {**self.net.to_dict(), "normalization": {"center": self.center, "scale": self.scale}}

    @classmethod
    def from_dict(cls, data: dict) -> "FusionModel":
        norm = data.get("normalization", {})
        return cls(Mlp.from_dict(data), float(norm.get("center", 0.0)), float(norm.get("scale", 1.0)))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def load(cls, path) -> "FusionModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def fit_fusion_model(inputs, targets, hidden=(8,), eta=0.01, epochs=2000, seed=0) -> tuple[FusionModel, list[float]]:
    """Standardise readings, then train a fresh net on ``inputs -> targets``."""
    x = np.asarray(inputs, dtype=float)
    t = np.asarray(targets, dtype=float)
    center = float(x.mean())
    scale = float(x.std()) or 1.0
    net = init_weights([x.shape[1], *hidden, 1], seed)
    result = train(net, TrainBatch((x - center) / scale, (t - center) / scale), eta, epochs)
    return FusionModel(result.net, center, scale), result.loss_history
