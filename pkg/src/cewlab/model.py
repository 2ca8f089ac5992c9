"""Small feedforward regressor of negativity, trained with Adam and early stopping.

Layer layout is fixed at [B, 32, 16, 1] by init(); the forward/backward
code itself handles any chain of ReLU hidden layers with an affine output,
which keeps toy nets testable by hand.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DivergedTraining, EmptyDataset, FormatError
from .qlinalg import make_rng, standard_normals

HIDDEN_SIZES = (32, 16)

# RNG stream ids far above any dataset draw index, so a shared seed never
# reuses dataset randomness for weights or shuffling.
_INIT_STREAM = 1 << 62
_SHUFFLE_STREAM = (1 << 62) + 1


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 256
    max_epochs: int = 200
    patience: int = 5
    seed: int = 0


@dataclass
class Mlp:
    weights: list[np.ndarray]  # per layer, shape (fan_in, fan_out)
    biases: list[np.ndarray]  # per layer, shape (fan_out,)
    meta: dict = field(default_factory=dict)

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def n_params(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)


@dataclass
class TrainResult:
    model: Mlp
    history: list[tuple[float, float]]  # (train_mse, val_mse) per epoch
    epochs_run: int
    best_epoch: int
    best_val_mse: float


class EarlyStopper:
    """Track the running best; stop after `patience` epochs without improvement."""

    def __init__(self, patience: int):
        if patience < 1:
            raise ValueError("patience must be at least 1")
        self.patience = patience
        self.best = np.inf
        self.best_index = 0
        self.bad = 0
        self.index = 0

    def update(self, value: float) -> bool:
        """Record one epoch's monitored value; True means stop now."""
        self.index += 1
        if value < self.best:
            self.best = value
            self.best_index = self.index
            self.bad = 0
        else:
            self.bad += 1
        return self.bad >= self.patience


def init_mlp(input_dim: int, cfg: TrainConfig) -> Mlp:
    """He-scaled normal weights, zero biases, deterministic in cfg.seed."""
    if input_dim < 1:
        raise ValueError("input_dim must be at least 1")
    rng = make_rng(cfg.seed, _INIT_STREAM)
    sizes = (input_dim, *HIDDEN_SIZES, 1)
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        scale = np.sqrt(2.0 / fan_in)
        weights.append(standard_normals(rng, (fan_in, fan_out)) * scale)
        biases.append(np.zeros(fan_out))
    return Mlp(weights, biases, {"seed": cfg.seed})


def _forward_batch(m: Mlp, x: np.ndarray) -> np.ndarray:
    h = x
    for w, b in zip(m.weights[:-1], m.biases[:-1]):
        h = np.maximum(h @ w + b, 0.0)
    return (h @ m.weights[-1] + m.biases[-1])[:, 0]


def forward(m: Mlp, x) -> float | np.ndarray:
    """Model output for one feature vector or a batch of them."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    batch = arr[None] if single else arr
    if batch.ndim != 2 or batch.shape[1] != m.input_dim:
        raise DimensionMismatch(
            f"model expects {m.input_dim} features, got shape {arr.shape}")
    out = _forward_batch(m, batch)
    return float(out[0]) if single else out


def predict_negativity(m: Mlp, x, clamp: bool = True):
    """Forward pass, optionally clamped to the physical range [0, 0.5]."""
    out = forward(m, x)
    if clamp:
        out = np.clip(out, 0.0, 0.5)
        return float(out) if np.ndim(out) == 0 else out
    return out


def gradient(m: Mlp, x: np.ndarray, y: np.ndarray):
    """Analytic gradient of the batch MSE; returns (weight grads, bias grads, mse)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if len(x) == 0:
        raise EmptyDataset("gradient needs a non-empty batch")
    if x.shape[1] != m.input_dim:
        raise DimensionMismatch(
            f"model expects {m.input_dim} features, got shape {x.shape}")
    pre = []
    acts = [x]
    h = x
    for w, b in zip(m.weights[:-1], m.biases[:-1]):
        z = h @ w + b
        pre.append(z)
        h = np.maximum(z, 0.0)
        acts.append(h)
    out = (h @ m.weights[-1] + m.biases[-1])[:, 0]
    err = out - y
    mse = float(np.mean(err**2))

    grads_w = [np.empty(0)] * len(m.weights)
    grads_b = [np.empty(0)] * len(m.biases)
    delta = (2.0 * err / len(y))[:, None]
    grads_w[-1] = acts[-1].T @ delta
    grads_b[-1] = delta.sum(axis=0)
    for layer in range(len(m.weights) - 2, -1, -1):
        delta = (delta @ m.weights[layer + 1].T) * (pre[layer] > 0.0)
        grads_w[layer] = acts[layer].T @ delta
        grads_b[layer] = delta.sum(axis=0)
    return grads_w, grads_b, mse


def _dataset_xy(data) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(data, "features") and hasattr(data, "negativities"):
        return data.features, data.negativities
    x, y = data
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def train(m: Mlp, train_data, val_data, cfg: TrainConfig, on_epoch=None) -> TrainResult:
    """Mini-batch Adam on MSE; returns the best-validation-epoch snapshot.

    Deterministic given cfg.seed: shuffling uses a dedicated stream and
    every reduction has a fixed order. `on_epoch(epoch, train_mse, val_mse)`
    is called after each epoch when given.
    """
    x_train, y_train = _dataset_xy(train_data)
    x_val, y_val = _dataset_xy(val_data)
    n = len(x_train)
    if n == 0 or len(x_val) == 0:
        raise EmptyDataset("training and validation sets must be non-empty")
    if x_train.shape[1] != m.input_dim or x_val.shape[1] != m.input_dim:
        raise DimensionMismatch(
            f"model expects {m.input_dim} features, got {x_train.shape[1]} train / {x_val.shape[1]} val")
    if cfg.batch_size < 1 or cfg.batch_size > n:
        raise ValueError("batch_size must be in [1, training-set size]")
    if cfg.max_epochs < 1:
        raise ValueError("max_epochs must be at least 1")

    rng = make_rng(cfg.seed, _SHUFFLE_STREAM)
    adam_mw = [np.zeros_like(w) for w in m.weights]
    adam_vw = [np.zeros_like(w) for w in m.weights]
    adam_mb = [np.zeros_like(b) for b in m.biases]
    adam_vb = [np.zeros_like(b) for b in m.biases]
    step = 0
    stopper = EarlyStopper(cfg.patience)
    best_weights = [w.copy() for w in m.weights]
    best_biases = [b.copy() for b in m.biases]
    history: list[tuple[float, float]] = []
    epochs_run = 0

    for epoch in range(1, cfg.max_epochs + 1):
        epochs_run = epoch
        perm = rng.permutation(n)
        sq_err_sum = 0.0
        for lo in range(0, n, cfg.batch_size):
            batch = perm[lo: lo + cfg.batch_size]
            grads_w, grads_b, mse = gradient(m, x_train[batch], y_train[batch])
            if not np.isfinite(mse):
                raise DivergedTraining(f"training loss became non-finite at epoch {epoch}")
            sq_err_sum += mse * len(batch)
            step += 1
            corr1 = 1.0 - cfg.beta1**step
            corr2 = 1.0 - cfg.beta2**step
            for params, grads, mom1, mom2 in (
                (m.weights, grads_w, adam_mw, adam_vw),
                (m.biases, grads_b, adam_mb, adam_vb),
            ):
                for i, g in enumerate(grads):
                    mom1[i] = cfg.beta1 * mom1[i] + (1.0 - cfg.beta1) * g
                    mom2[i] = cfg.beta2 * mom2[i] + (1.0 - cfg.beta2) * g * g
                    params[i] -= cfg.learning_rate * (mom1[i] / corr1) / (np.sqrt(mom2[i] / corr2) + cfg.epsilon)
        train_mse = sq_err_sum / n
        val_mse = float(np.mean((_forward_batch(m, x_val) - y_val) ** 2))
        if not np.isfinite(val_mse):
            raise DivergedTraining(f"validation loss became non-finite at epoch {epoch}")
        history.append((train_mse, val_mse))
        improved = val_mse < stopper.best
        should_stop = stopper.update(val_mse)
        if improved:
            best_weights = [w.copy() for w in m.weights]
            best_biases = [b.copy() for b in m.biases]
        if on_epoch is not None:
            on_epoch(epoch, train_mse, val_mse)
        if should_stop:
            break

    m.weights = best_weights
    m.biases = best_biases
    preset = getattr(getattr(train_data, "preset", None), "name", None)
    m.meta.update({
        "preset": preset,
        "seed": cfg.seed,
        "epochs_run": epochs_run,
        "val_mse": stopper.best,
    })
    return TrainResult(m, history, epochs_run, stopper.best_index, stopper.best)


def save_model(m: Mlp, path: str) -> None:
    doc = {
        "layer_sizes": m.layer_sizes,
        "activation": "relu",
        "output": "affine",
        "weights": [w.tolist() for w in m.weights],
        "biases": [b.tolist() for b in m.biases],
        "meta": m.meta,
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path: str) -> Mlp:
    try:
        with open(path) as fh:
            doc = json.load(fh)
        sizes = list(doc["layer_sizes"])
        weights = [np.array(w, dtype=float) for w in doc["weights"]]
        biases = [np.array(b, dtype=float) for b in doc["biases"]]
        meta = dict(doc.get("meta", {}))
    except FileNotFoundError:
        raise
    except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if len(weights) != len(sizes) - 1 or len(biases) != len(weights):
        raise FormatError(f"{path}: layer counts are inconsistent")
    for i, (w, b) in enumerate(zip(weights, biases)):
        if w.shape != (sizes[i], sizes[i + 1]) or b.shape != (sizes[i + 1],):
            raise FormatError(f"{path}: layer {i} shapes do not match layer_sizes")
    return Mlp(weights, biases, meta)
