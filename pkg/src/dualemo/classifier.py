"""Feedforward veracity classifier with optional detector-embedding input.

The network maps ``[detector_embedding, emotion_features]`` through ReLU
hidden layers to a softmax over the veracity classes. Training is plain
mini-batch gradient descent on class-weighted cross-entropy.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .metrics import macro_f1_from_indices

logger = logging.getLogger(__name__)

FORMAT_NAME = "dualemo-mlp"
FORMAT_VERSION = 1
DEFAULT_HIDDEN = (256, 128, 64, 32)
ACTIVATIONS = ("relu",)


class ModelFormatError(ValueError):
    pass


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class FeatureSpec:
    feature_dim: int
    embedding_dim: int = 0

    @property
    def input_dim(self) -> int:
        return self.feature_dim + self.embedding_dim


@dataclass
class MlpModel:
    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    feature_spec: FeatureSpec
    classes: list[str]
    activation: str = "relu"
    seed: int = 0
    # standardization applied to the concatenated input before the first layer
    input_shift: np.ndarray | None = None
    input_scale: np.ndarray | None = None

    def __post_init__(self):
        if len(self.weights) != len(self.layer_dims) - 1 or len(self.biases) != len(self.weights):
            raise ValueError("one weight matrix and bias per layer transition")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.layer_dims[k + 1], self.layer_dims[k]) or b.shape != (self.layer_dims[k + 1],):
                raise ValueError(f"layer {k}: weight {w.shape} / bias {b.shape} do not match dims {self.layer_dims}")
        if self.layer_dims[0] != self.feature_spec.input_dim:
            raise ValueError("first layer width differs from feature_spec input")
        if self.layer_dims[-1] != len(self.classes):
            raise ValueError("output width differs from number of classes")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unsupported activation {self.activation!r}")

    @property
    def n_classes(self) -> int:
        return self.layer_dims[-1]

    def parameters(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def copy(self) -> "MlpModel":
        return MlpModel(
            list(self.layer_dims), [w.copy() for w in self.weights], [b.copy() for b in self.biases],
            self.feature_spec, list(self.classes), self.activation, self.seed,
            None if self.input_shift is None else self.input_shift.copy(),
            None if self.input_scale is None else self.input_scale.copy(),
        )


def build_mlp(input_dim: int, hidden_dims: Sequence[int] | None = None, classes: int | Sequence[str] = 2,
              seed: int = 42, embedding_dim: int = 0) -> MlpModel:
    """Fresh network with He-uniform weights and zero biases.

    ``input_dim`` counts the emotion features; ``embedding_dim`` extra inputs
    are reserved in front of them for a detector embedding.
    """
    if hidden_dims is None:
        hidden_dims = DEFAULT_HIDDEN
    hidden_dims = list(hidden_dims)
    if not hidden_dims:
        raise ValueError("at least one hidden layer is required")
    names = [f"class{k}" for k in range(classes)] if isinstance(classes, int) else list(classes)
    if input_dim < 1 or len(names) < 1 or embedding_dim < 0 or any(h < 1 for h in hidden_dims):
        raise ValueError("dimensions must be positive")
    spec = FeatureSpec(input_dim, embedding_dim)
    dims = [spec.input_dim] + hidden_dims + [len(names)]
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(dims, weights, biases, spec, names, "relu", seed)


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def assemble_inputs(model: MlpModel, features, embeddings=None) -> np.ndarray:
    """Stack ``[embedding, features]`` rows, checking widths against the model."""
    x = np.atleast_2d(np.asarray(features, dtype=float))
    spec = model.feature_spec
    if x.shape[1] != spec.feature_dim:
        raise ValueError(f"expected {spec.feature_dim} features, got {x.shape[1]}")
    if spec.embedding_dim:
        if embeddings is None:
            raise ValueError(f"model expects a detector embedding of length {spec.embedding_dim}")
        e = np.atleast_2d(np.asarray(embeddings, dtype=float))
        if e.shape != (x.shape[0], spec.embedding_dim):
            raise ValueError(f"expected embeddings of shape {(x.shape[0], spec.embedding_dim)}, got {e.shape}")
        x = np.hstack([e, x])
    elif embeddings is not None:
        raise ValueError("model was built without a detector embedding input")
    return x


def _standardize(model: MlpModel, x: np.ndarray) -> np.ndarray:
    if model.input_shift is not None:
        x = (x - model.input_shift) / model.input_scale
    return x


def _forward(model: MlpModel, x: np.ndarray):
    """Return (softmax output, cached layer inputs, pre-activations)."""
    inputs, pre = [], []
    h = x
    last = len(model.weights) - 1
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        inputs.append(h)
        z = h @ w.T + b
        pre.append(z)
        h = z if k == last else np.maximum(z, 0.0)
    return _softmax(h), inputs, pre


def predict_proba(model: MlpModel, features, embeddings=None) -> np.ndarray:
    x = _standardize(model, assemble_inputs(model, features, embeddings))
    return _forward(model, x)[0]


def predict(model: MlpModel, features: Sequence[float], detector_embedding: Sequence[float] | None = None) -> np.ndarray:
    """Class probabilities for one sample."""
    return predict_proba(model, [features], None if detector_embedding is None else [detector_embedding])[0]


def _loss_and_grads(model: MlpModel, x: np.ndarray, y: np.ndarray, sample_weights: np.ndarray):
    probs, inputs, pre = _forward(model, x)
    n = x.shape[0]
    norm = sample_weights.sum()
    picked = np.clip(probs[np.arange(n), y], 1e-300, None)
    loss = float(np.dot(sample_weights, -np.log(picked)) / norm)

    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta *= (sample_weights / norm)[:, None]
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.weights)
    for k in range(len(model.weights) - 1, -1, -1):
        grads_w[k] = delta.T @ inputs[k]
        grads_b[k] = delta.sum(axis=0)
        if k:
            delta = (delta @ model.weights[k]) * (pre[k - 1] > 0)
    return loss, grads_w, grads_b


def class_weight_vector(labels: np.ndarray, n_classes: int, mode: str = "none") -> np.ndarray:
    """Per-class loss weights; ``inverse`` uses inverse frequency scaled to mean 1."""
    if mode in ("none", None):
        return np.ones(n_classes)
    if mode not in ("inverse", "inverse_frequency"):
        raise ValueError(f"unknown class weight mode {mode!r}")
    counts = np.bincount(labels, minlength=n_classes).astype(float)
    present = counts > 0
    w = np.ones(n_classes)
    w[present] = counts[present].sum() / counts[present]
    w[present] /= w[present].mean()
    return w


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    learning_rate: float = 0.05
    batch_size: int = 32
    class_weights: str = "none"
    patience: int = 10
    seed: int = 42
    standardize: bool = True

    def __post_init__(self):
        if self.epochs < 1 or self.learning_rate <= 0 or self.batch_size < 1 or self.patience < 1:
            raise ValueError("epochs, learning_rate, batch_size and patience must be positive")
        if self.class_weights not in ("none", "inverse", "inverse_frequency"):
            raise ValueError(f"unknown class weight mode {self.class_weights!r}")


@dataclass
class TrainHistory:
    loss: list[float] = field(default_factory=list)
    val_macro_f1: list[float] = field(default_factory=list)
    best_epoch: int = -1
    stopped_epoch: int = -1

    def to_dict(self) -> dict:
        return {"loss": self.loss, "val_macro_f1": self.val_macro_f1,
                "best_epoch": self.best_epoch, "stopped_epoch": self.stopped_epoch}


def _fit_standardizer(model: MlpModel, x: np.ndarray) -> None:
    shift = x.mean(axis=0)
    scale = x.std(axis=0)
    scale[scale < 1e-12] = 1.0
    model.input_shift, model.input_scale = shift, scale


def train(model: MlpModel, train_set: tuple, val_set: tuple | None = None,
          config: TrainConfig | None = None) -> tuple[MlpModel, TrainHistory]:
    """Fit ``model`` and return a trained copy with its history.

    ``train_set`` and ``val_set`` are ``(features, labels)`` or
    ``(features, labels, embeddings)`` with integer class labels. With a
    validation set, training stops after ``patience`` epochs without a macro
    F1 improvement and the best weights are restored.
    """
    config = config or TrainConfig()
    x_raw = assemble_inputs(model, train_set[0], train_set[2] if len(train_set) > 2 else None)
    y = np.asarray(train_set[1], dtype=int)
    if len(y) == 0:
        raise ValueError("empty training set")
    if len(y) != x_raw.shape[0]:
        raise ValueError("features and labels differ in length")
    if y.min() < 0 or y.max() >= model.n_classes:
        raise ValueError("label outside the model's classes")

    model = model.copy()
    if config.standardize:
        _fit_standardizer(model, x_raw)
    x = _standardize(model, x_raw)

    val_x = val_y = None
    if val_set is not None and len(val_set[1]):
        val_x = _standardize(model, assemble_inputs(model, val_set[0], val_set[2] if len(val_set) > 2 else None))
        val_y = np.asarray(val_set[1], dtype=int)

    weights = class_weight_vector(y, model.n_classes, config.class_weights)
    rng = np.random.default_rng(config.seed)
    history = TrainHistory()
    best_f1, best_model, stale = -1.0, model.copy(), 0

    for epoch in range(config.epochs):
        order = rng.permutation(len(y))
        total, seen = 0.0, 0
        for start in range(0, len(y), config.batch_size):
            idx = order[start:start + config.batch_size]
            loss, gw, gb = _loss_and_grads(model, x[idx], y[idx], weights[y[idx]])
            if not np.isfinite(loss):
                raise TrainingError(f"loss became {loss} at epoch {epoch}, batch starting {start}; "
                                    "lower the learning rate or check the features for NaN/inf")
            for k in range(len(model.weights)):
                model.weights[k] -= config.learning_rate * gw[k]
                model.biases[k] -= config.learning_rate * gb[k]
            total += loss * len(idx)
            seen += len(idx)
        history.loss.append(total / seen)
        history.stopped_epoch = epoch

        if val_x is None:
            continue
        pred = _forward(model, val_x)[0].argmax(axis=1)
        f1 = macro_f1_from_indices(val_y, pred)
        history.val_macro_f1.append(f1)
        if f1 > best_f1:
            best_f1, best_model, stale = f1, model.copy(), 0
            history.best_epoch = epoch
        else:
            stale += 1
            if stale >= config.patience:
                break

    if val_x is None:
        history.best_epoch = history.stopped_epoch
        return model, history
    return best_model, history


def _extended_loss(params: list[np.ndarray], x: np.ndarray, y: int) -> np.longdouble:
    """Unweighted cross-entropy of one sample in extended precision."""
    h = x.astype(np.longdouble)
    n_layers = len(params) // 2
    for k in range(n_layers):
        z = params[2 * k].astype(np.longdouble) @ h + params[2 * k + 1].astype(np.longdouble)
        h = z if k == n_layers - 1 else np.maximum(z, 0)
    h = h - h.max()
    return np.log(np.exp(h).sum()) - h[y]


def gradient_check(model: MlpModel, sample: tuple, epsilon: float = 1e-5) -> float:
    """Largest relative gap between backprop and central finite differences.

    ``sample`` is ``(features, label)`` or ``(features, label, embedding)``.
    Relative error per parameter is ``|a - n| / max(|a| + |n|, 1e-8)``. The
    finite differences evaluate the loss in extended precision so that
    rounding noise does not swamp small gradients.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    emb = None if len(sample) < 3 or sample[2] is None else [sample[2]]
    x = _standardize(model, assemble_inputs(model, [sample[0]], emb))
    y = int(sample[1])
    _, gw, gb = _loss_and_grads(model, x, np.array([y]), np.ones(1))
    analytic = []
    for w, b in zip(gw, gb):
        analytic += [w, b]

    params = [p.astype(np.longdouble) for p in model.parameters()]
    worst = 0.0
    for param, grad in zip(params, analytic):
        flat = param.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + epsilon
            up = _extended_loss(params, x[0], y)
            flat[i] = keep - epsilon
            down = _extended_loss(params, x[0], y)
            flat[i] = keep
            numeric = float((up - down) / (2 * np.longdouble(epsilon)))
            denom = max(abs(gflat[i]) + abs(numeric), 1e-8)
            worst = max(worst, abs(gflat[i] - numeric) / denom)
    return worst


def save_model(model: MlpModel, path: str | Path) -> None:
    obj = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "layer_dims": model.layer_dims,
        "activation": model.activation,
        "classes": model.classes,
        "seed": model.seed,
        "feature_spec": {"feature_dim": model.feature_spec.feature_dim,
                         "embedding_dim": model.feature_spec.embedding_dim},
        "weights": [w.ravel().tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "input_shift": None if model.input_shift is None else model.input_shift.tolist(),
        "input_scale": None if model.input_scale is None else model.input_scale.tolist(),
    }
    Path(path).write_text(json.dumps(obj, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> MlpModel:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: corrupt model file ({exc.msg})") from None
    if not isinstance(obj, dict) or obj.get("format") != FORMAT_NAME:
        raise ModelFormatError(f"{path}: not a {FORMAT_NAME} file")
    if obj.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"{path}: format version {obj.get('version')!r}, expected {FORMAT_VERSION}")
    try:
        dims = [int(d) for d in obj["layer_dims"]]
        weights = [np.array(w, dtype=float).reshape(dims[k + 1], dims[k]) for k, w in enumerate(obj["weights"])]
        biases = [np.array(b, dtype=float) for b in obj["biases"]]
        spec = FeatureSpec(int(obj["feature_spec"]["feature_dim"]), int(obj["feature_spec"]["embedding_dim"]))
        shift = None if obj.get("input_shift") is None else np.array(obj["input_shift"], dtype=float)
        scale = None if obj.get("input_scale") is None else np.array(obj["input_scale"], dtype=float)
        return MlpModel(dims, weights, biases, spec, list(obj["classes"]), obj["activation"],
                        int(obj["seed"]), shift, scale)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ModelFormatError(f"{path}: malformed model ({exc})") from None
