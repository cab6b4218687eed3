"""Dense feedforward networks trained by per-example backpropagation.

Everything is float64.  The output layer must use softmax and the loss
is cross-entropy against one-hot targets, so the output delta is simply
prediction minus target.  Models serialize to versioned JSON.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

MODEL_VERSION = 1

SIGMOID = "sigmoid"
TANH = "tanh"
RELU = "relu"
LINEAR = "linear"
SOFTMAX = "softmax"

ACTIVATIONS = (SIGMOID, TANH, RELU, LINEAR, SOFTMAX)


class ModelFormatError(ValueError):
    """Raised when a model file is unreadable or has the wrong schema."""


def softmax(z: np.ndarray) -> np.ndarray:
    """Softmax with max-subtraction for overflow safety."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max()
    exps = np.exp(shifted)
    return exps / exps.sum()


def cross_entropy(pred: np.ndarray, target: np.ndarray, eps: float = 1e-12) -> float:
    """-sum(target * ln(pred)), with predictions clamped at eps."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: pred {pred.shape} vs target {target.shape}")
    return float(-(target * np.log(np.maximum(pred, eps))).sum())


def _stable_sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == SIGMOID:
        return _stable_sigmoid(z)
    if name == TANH:
        return np.tanh(z)
    if name == RELU:
        return np.maximum(0.0, z)
    if name == LINEAR:
        return z
    if name == SOFTMAX:
        return softmax(z)
    raise ValueError(f"unknown activation {name!r}")


def _activation_derivative(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if name == SIGMOID:
        return a * (1.0 - a)
    if name == TANH:
        return 1.0 - a * a
    if name == RELU:
        return (z > 0).astype(np.float64)
    if name == LINEAR:
        return np.ones_like(z)
    raise ValueError(f"no elementwise derivative for activation {name!r}")


@dataclass(eq=False)
class Layer:
    name: str
    weights: np.ndarray  # shape (output_dim, input_dim)
    biases: np.ndarray  # shape (output_dim,)
    activation: str

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.biases = np.asarray(self.biases, dtype=np.float64)
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.weights.ndim != 2:
            raise ValueError(f"weights of {self.name!r} must be a matrix")
        if self.biases.shape != (self.weights.shape[0],):
            raise ValueError(
                f"biases of {self.name!r} must match the weight rows "
                f"({self.weights.shape[0]}), got {self.biases.shape}"
            )

    @property
    def input_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def output_dim(self) -> int:
        return self.weights.shape[0]


@dataclass(eq=False)
class Network:
    layers: tuple[Layer, ...]

    def __post_init__(self) -> None:
        self.layers = tuple(self.layers)
        if not self.layers:
            raise ValueError("network needs at least one layer")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.output_dim != nxt.input_dim:
                raise ValueError(
                    f"layer {nxt.name!r} expects {nxt.input_dim} inputs but "
                    f"{prev.name!r} produces {prev.output_dim}"
                )
        for layer in self.layers[:-1]:
            if layer.activation == SOFTMAX:
                raise ValueError("softmax is only permitted on the final layer")

    @property
    def input_dim(self) -> int:
        return self.layers[0].input_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].output_dim

    @property
    def hidden_layer_count(self) -> int:
        return max(len(self.layers) - 1, 0)

    @property
    def is_deep(self) -> bool:
        """Five or more hidden layers."""
        return self.hidden_layer_count >= 5


def layer_init(
    name: str,
    input_dim: int,
    output_dim: int,
    activation: str,
    scale: float,
    rng: np.random.Generator,
) -> Layer:
    """Layer with weights and biases drawn i.i.d. uniform from [-scale, scale]."""
    if input_dim < 1 or output_dim < 1:
        raise ValueError("layer dimensions must be >= 1")
    if scale < 0:
        raise ValueError("randomisation scale must be >= 0")
    weights = rng.uniform(-scale, scale, size=(output_dim, input_dim))
    biases = rng.uniform(-scale, scale, size=output_dim)
    return Layer(name, weights, biases, activation)


def init_network(
    specs: Sequence[tuple[str, int, int, str, float]], seed: int
) -> Network:
    """Build a network from (name, input_dim, output_dim, activation, scale)
    tuples using one seeded generator, so results are reproducible."""
    rng = np.random.default_rng(seed)
    return Network(tuple(layer_init(*spec, rng) for spec in specs))


def forward(
    net: Network, x: np.ndarray
) -> tuple[np.ndarray, list[tuple[np.ndarray, np.ndarray, np.ndarray]]]:
    """Map an input vector through the network.

    Returns the output vector and a per-layer cache of (input, pre-activation,
    activation) sufficient for backpropagation.
    """
    a = np.asarray(x, dtype=np.float64)
    if a.shape != (net.input_dim,):
        raise ValueError(f"input must have shape ({net.input_dim},), got {a.shape}")
    caches = []
    for layer in net.layers:
        z = layer.weights @ a + layer.biases
        out = _activate(layer.activation, z)
        caches.append((a, z, out))
        a = out
    return a, caches


def loss_and_gradients(
    net: Network, x: np.ndarray, target: np.ndarray
) -> tuple[float, list[tuple[np.ndarray, np.ndarray]]]:
    """Cross-entropy loss and per-layer (dW, db) for one example.

    Requires a softmax output layer; the output delta is prediction
    minus target.
    """
    if net.layers[-1].activation != SOFTMAX:
        raise ValueError("gradient computation requires a softmax output layer")
    pred, caches = forward(net, x)
    target = np.asarray(target, dtype=np.float64)
    if target.shape != pred.shape:
        raise ValueError(f"target must have shape {pred.shape}, got {target.shape}")
    loss = cross_entropy(pred, target)
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(net.layers)  # type: ignore[list-item]
    delta = pred - target
    for index in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[index]
        layer_input, _, _ = caches[index]
        grads[index] = (np.outer(delta, layer_input), delta)
        if index > 0:
            below = net.layers[index - 1]
            _, z_below, a_below = caches[index - 1]
            delta = (layer.weights.T @ delta) * _activation_derivative(
                below.activation, z_below, a_below
            )
    return loss, grads


def backprop_update(
    net: Network, x: np.ndarray, target: np.ndarray, lr: float
) -> tuple[Network, float]:
    """One vanilla gradient-descent step on every weight and bias.

    Returns the updated network and the loss at the pre-update parameters.
    """
    loss, grads = loss_and_gradients(net, x, target)
    new_layers = tuple(
        Layer(layer.name, layer.weights - lr * dw, layer.biases - lr * db, layer.activation)
        for layer, (dw, db) in zip(net.layers, grads)
    )
    return Network(new_layers), loss


def networks_equal(a: Network, b: Network) -> bool:
    """Bitwise equality of structure and parameters."""
    if len(a.layers) != len(b.layers):
        return False
    for la, lb in zip(a.layers, b.layers):
        if la.name != lb.name or la.activation != lb.activation:
            return False
        if not np.array_equal(la.weights, lb.weights):
            return False
        if not np.array_equal(la.biases, lb.biases):
            return False
    return True


@dataclass(frozen=True)
class TrainingParams:
    epochs: int
    learning_rate: float
    seed: int

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be a positive integer")
        if not self.learning_rate > 0:
            raise ValueError("learning rate must be > 0")


def network_to_dict(net: Network) -> dict:
    return {
        "version": MODEL_VERSION,
        "layers": [
            {
                "name": layer.name,
                "in": layer.input_dim,
                "out": layer.output_dim,
                "activation": layer.activation,
                "weights": layer.weights.tolist(),
                "biases": layer.biases.tolist(),
            }
            for layer in net.layers
        ],
    }


def network_from_dict(data: dict) -> Network:
    if not isinstance(data, dict) or "version" not in data:
        raise ModelFormatError("model file is missing a version field")
    if data["version"] != MODEL_VERSION:
        raise ModelFormatError(
            f"unsupported model version {data['version']!r}, expected {MODEL_VERSION}"
        )
    raw_layers = data.get("layers")
    if not isinstance(raw_layers, list) or not raw_layers:
        raise ModelFormatError("model file has no layers")
    layers = []
    for entry in raw_layers:
        try:
            layer = Layer(
                entry["name"], entry["weights"], entry["biases"], entry["activation"]
            )
            if layer.input_dim != entry["in"] or layer.output_dim != entry["out"]:
                raise ModelFormatError(
                    f"declared dimensions of layer {entry['name']!r} do not match "
                    "its parameters"
                )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ModelFormatError):
                raise
            raise ModelFormatError(f"malformed layer entry: {exc}") from exc
        layers.append(layer)
    try:
        return Network(tuple(layers))
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc


def save_network(net: Network, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(network_to_dict(net), handle)
        handle.write("\n")


def load_network(path: str | os.PathLike) -> Network:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc.msg}") from exc
    return network_from_dict(data)
