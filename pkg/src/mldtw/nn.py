"""Small dense classifier: standardization, ReLU hidden layers, softmax output.

Trained with mini-batch Adam on categorical cross-entropy, with early
stopping on a held-out split. Plain numpy; one instance per waypoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateLabelsError

RELU = "relu"
SOFTMAX = "softmax"


def relu(v):
    return np.maximum(v, 0.0)


def softmax(z):
    """Row-wise softmax with max subtraction; accepts a vector or a batch."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


@dataclass
class Scaler:
    means: np.ndarray
    stds: np.ndarray

    def transform(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.means.shape[0]:
            raise ValueError(f"expected {self.means.shape[0]} features, got {X.shape[-1]}")
        return (X - self.means) / self.stds


def scaler_fit(X) -> Scaler:
    """Per-feature mean / population std; zero-variance features get std 1."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("scaler needs a 2-D matrix with at least 2 rows")
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds[stds == 0] = 1.0
    return Scaler(means, stds)


def scaler_transform(S: Scaler, X):
    return S.transform(X)


@dataclass
class Dense:
    weights: np.ndarray  # (fan_in, fan_out)
    biases: np.ndarray
    activation: str

    def forward(self, x):
        z = x @ self.weights + self.biases
        return relu(z) if self.activation == RELU else softmax(z)


@dataclass
class DenseNet:
    layers: List[Dense]
    label_map: List[Tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        for a, b in zip(self.layers, self.layers[1:]):
            if a.weights.shape[1] != b.weights.shape[0]:
                raise ValueError("layer dimensions do not chain")
        if self.layers[-1].activation != SOFTMAX:
            raise ValueError("last layer must be softmax")
        if any(layer.activation != RELU for layer in self.layers[:-1]):
            raise ValueError("hidden layers must be relu")
        if self.label_map and len(self.label_map) != self.layers[-1].weights.shape[1]:
            raise ValueError("output width must equal label count")

    @property
    def input_dim(self) -> int:
        return self.layers[0].weights.shape[0]

    @property
    def output_dim(self) -> int:
        return self.layers[-1].weights.shape[1]

    def predict_proba(self, X):
        h = np.asarray(X, dtype=np.float64)
        for layer in self.layers:
            h = layer.forward(h)
        return h

    def params(self) -> List[np.ndarray]:
        out = []
        for layer in self.layers:
            out += [layer.weights, layer.biases]
        return out


def init_net(sizes: Sequence[int], rng: np.random.Generator, label_map=None) -> DenseNet:
    """He-uniform weights (limit sqrt(6 / fan_in)), zero biases."""
    layers = []
    for k, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:])):
        limit = np.sqrt(6.0 / fan_in)
        W = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        act = SOFTMAX if k == len(sizes) - 2 else RELU
        layers.append(Dense(W, np.zeros(fan_out), act))
    return DenseNet(layers, list(label_map) if label_map is not None else [])


def cross_entropy(probs, y) -> float:
    p = probs[np.arange(len(y)), y]
    return float(-np.mean(np.log(np.maximum(p, 1e-300))))


def loss_and_grads(net: DenseNet, X, y):
    """Mean cross-entropy and its gradients, in ``net.params()`` order."""
    acts = [X]
    for layer in net.layers[:-1]:
        acts.append(relu(acts[-1] @ layer.weights + layer.biases))
    last = net.layers[-1]
    probs = softmax(acts[-1] @ last.weights + last.biases)
    loss = cross_entropy(probs, y)

    delta = probs.copy()
    delta[np.arange(len(y)), y] -= 1.0
    delta /= len(y)
    grads = []
    for k in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[k]
        grads.append(delta.sum(axis=0))
        grads.append(acts[k].T @ delta)
        if k > 0:
            delta = (delta @ layer.weights.T) * (acts[k] > 0)
    grads.reverse()
    return loss, grads


@dataclass
class TrainConfig:
    max_epochs: int = 200
    patience: int = 10
    batch_size: int = 32
    learning_rate: float = 1e-3
    validation_fraction: float = 0.2
    seed: int = 0
    hidden: Tuple[int, ...] = (300,)
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.max_epochs < 1 or self.patience < 1 or self.batch_size < 1:
            raise ValueError("epochs, patience and batch size must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if not 0.0 < self.validation_fraction <= 0.5:
            raise ValueError("validation_fraction must lie in (0, 0.5]")
        if any(h < 1 for h in self.hidden):
            raise ValueError("hidden widths must be positive")


class Adam:
    def __init__(self, params, lr, beta1, beta2, eps):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        c1 = 1 - self.b1**self.t
        c2 = 1 - self.b2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def _evaluate(net, X, y):
    probs = net.predict_proba(X)
    return cross_entropy(probs, y), float(np.mean(np.argmax(probs, axis=1) == y))


def train_classifier(X, y, cfg: Optional[TrainConfig] = None, label_map=None):
    """Fit a DenseNet on (already scaled) features X and integer labels y.

    Returns the network restored to its best validation-loss epoch and a
    history dict with per-epoch ``loss``, ``accuracy``, ``val_loss`` and
    ``val_accuracy`` plus ``best_epoch`` and ``epochs_run``.
    """
    cfg = cfg or TrainConfig()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be 2-D with one row per label")
    if not np.all(np.isfinite(X)):
        raise ValueError("features contain non-finite values")
    n_labels = int(y.max()) + 1 if label_map is None else len(label_map)
    if y.min() < 0 or y.max() >= n_labels:
        raise ValueError("label index out of range")
    if len(np.unique(y)) < 2:
        raise DegenerateLabelsError("need at least 2 distinct labels")

    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(y))
    n_val = max(1, int(round(cfg.validation_fraction * len(y))))
    val_idx, tr_idx = order[:n_val], order[n_val:]
    Xtr, ytr, Xva, yva = X[tr_idx], y[tr_idx], X[val_idx], y[val_idx]

    sizes = [X.shape[1], *cfg.hidden, n_labels]
    net = init_net(sizes, rng, label_map)
    params = net.params()
    opt = Adam(params, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps)

    history: Dict[str, list] = {"loss": [], "accuracy": [], "val_loss": [], "val_accuracy": []}
    best_loss = np.inf
    best_params = [p.copy() for p in params]
    best_epoch = 0
    stale = 0
    for epoch in range(cfg.max_epochs):
        perm = rng.permutation(len(ytr))
        for start in range(0, len(perm), cfg.batch_size):
            batch = perm[start : start + cfg.batch_size]
            _, grads = loss_and_grads(net, Xtr[batch], ytr[batch])
            opt.step(params, grads)
        tr_loss, tr_acc = _evaluate(net, Xtr, ytr)
        va_loss, va_acc = _evaluate(net, Xva, yva)
        history["loss"].append(tr_loss)
        history["accuracy"].append(tr_acc)
        history["val_loss"].append(va_loss)
        history["val_accuracy"].append(va_acc)
        if va_loss < best_loss:
            best_loss, best_epoch, stale = va_loss, epoch, 0
            best_params = [p.copy() for p in params]
        else:
            stale += 1
            if stale >= cfg.patience:
                break

    for p, best in zip(params, best_params):
        p[...] = best
    history["best_epoch"] = best_epoch
    history["epochs_run"] = len(history["loss"])
    return net, history


def predict(net: DenseNet, scaler: Scaler, x) -> Tuple[Tuple[int, int], float]:
    """Most probable label and its softmax probability (ties -> lowest index)."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] != net.input_dim:
        raise ValueError(f"expected {net.input_dim} features, got {x.shape[0]}")
    probs = net.predict_proba(scaler.transform(x[None, :]))[0]
    k = int(np.argmax(probs))
    return net.label_map[k], float(probs[k])
