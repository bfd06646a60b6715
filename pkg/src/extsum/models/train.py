"""Shared training loop: seeded init, document batching, Adam/SGD, BCE.

Training runs in float64 and is bit-deterministic for a fixed seed and
config: parameter init and epoch shuffles draw from one generator in a
fixed order, and gradient accumulation order never varies.
"""

import hashlib
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ConfigError, DataError, NumericError
from . import feedforward, logistic, lstm
from .ops import class_weights

MODEL_KINDS = ("logistic", "ffnn", "lstm-uni", "lstm-bi")


@dataclass
class DocSample:
    """One document's classifier input: features and gold labels per sentence."""

    doc_id: str
    X: np.ndarray  # (n_sentences, n_features) float64
    y: np.ndarray  # (n_sentences,) float64 in {0, 1}
    mask: Optional[np.ndarray] = None  # tail-only validity; None = all valid


@dataclass
class ModelSpec:
    """Architecture description, stored alongside weights in checkpoints."""

    kind: str
    input_dim: int
    hidden: tuple[int, ...] = (50, 50)  # ffnn hidden widths
    activation: str = "relu"  # ffnn hidden activation
    hidden_size: int = 50  # lstm hidden size per direction

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}; choose from {MODEL_KINDS}")
        if self.input_dim < 1:
            raise ConfigError(f"input_dim must be positive, got {self.input_dim}")

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "input_dim": self.input_dim,
            "hidden": list(self.hidden),
            "activation": self.activation,
            "hidden_size": self.hidden_size,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ModelSpec":
        return cls(
            kind=obj["kind"],
            input_dim=int(obj["input_dim"]),
            hidden=tuple(obj["hidden"]),
            activation=obj["activation"],
            hidden_size=int(obj["hidden_size"]),
        )


@dataclass
class TrainConfig:
    epochs: int = 50
    learning_rate: float = 1e-3
    optimizer: str = "adam"  # "adam" | "sgd"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    class_balance: bool = True
    batch_docs: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.optimizer not in ("adam", "sgd"):
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        if self.batch_docs < 1:
            raise ConfigError(f"batch_docs must be >= 1, got {self.batch_docs}")

    def as_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "optimizer": self.optimizer,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "class_balance": self.class_balance,
            "batch_docs": self.batch_docs,
            "seed": self.seed,
        }


@dataclass
class TrainReport:
    epoch_losses: list[float] = field(default_factory=list)
    params_checksum: str = ""
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        return {
            "epoch_losses": self.epoch_losses,
            "params_checksum": self.params_checksum,
            "wall_time": self.wall_time,
        }


def model_module(kind: str):
    if kind == "logistic":
        return logistic
    if kind == "ffnn":
        return feedforward
    if kind in ("lstm-uni", "lstm-bi"):
        return lstm
    raise ConfigError(f"unknown model kind {kind!r}")


def init_params(spec: ModelSpec, rng: np.random.Generator):
    if spec.kind == "logistic":
        return logistic.init_params(rng, spec.input_dim)
    if spec.kind == "ffnn":
        return feedforward.init_params(rng, spec.input_dim, spec.hidden, spec.activation)
    return lstm.init_params(
        rng, spec.input_dim, spec.hidden_size, bidirectional=spec.kind == "lstm-bi"
    )


def params_from_arrays(spec: ModelSpec, arrays: dict[str, np.ndarray]):
    if spec.kind == "logistic":
        return logistic.from_arrays(arrays)
    if spec.kind == "ffnn":
        return feedforward.from_arrays(arrays, spec.hidden, spec.activation)
    return lstm.from_arrays(arrays, spec.hidden_size, bidirectional=spec.kind == "lstm-bi")


def predict_probs(spec: ModelSpec, params, X: np.ndarray) -> np.ndarray:
    """Per-sentence probabilities for one document's feature matrix."""
    return model_module(spec.kind).forward_batch(params, X)


def params_checksum(params) -> str:
    """sha256 over the float32 weight blobs, in section order."""
    digest = hashlib.sha256()
    for name, arr in params.arrays().items():
        digest.update(name.encode("utf-8"))
        digest.update(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    return digest.hexdigest()


class Adam:
    def __init__(self, arrays: dict[str, np.ndarray], lr, beta1, beta2, eps):
        self.arrays = arrays
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {name: np.zeros_like(arr) for name, arr in arrays.items()}
        self.v = {name: np.zeros_like(arr) for name, arr in arrays.items()}

    def step(self, grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        bias1 = 1.0 - self.beta1**self.t
        bias2 = 1.0 - self.beta2**self.t
        for name, arr in self.arrays.items():
            g = grads[name]
            self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * g * g
            m_hat = self.m[name] / bias1
            v_hat = self.v[name] / bias2
            arr -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class Sgd:
    def __init__(self, arrays: dict[str, np.ndarray], lr):
        self.arrays = arrays
        self.lr = lr

    def step(self, grads: dict[str, np.ndarray]) -> None:
        for name, arr in self.arrays.items():
            arr -= self.lr * grads[name]


def train(spec: ModelSpec, docs: list[DocSample], cfg: TrainConfig):
    """Fit one classifier; returns (params, TrainReport).

    The per-epoch loss is the weight-normalized mean over every sentence
    seen that epoch, evaluated before each batch's update (the usual
    running-loss convention).
    """
    if not docs:
        raise DataError("training dataset is empty")
    all_labels = np.concatenate([d.y for d in docs])
    weights = class_weights(all_labels, cfg.class_balance)

    rng = np.random.default_rng(cfg.seed)
    params = init_params(spec, rng)
    model = model_module(spec.kind)
    opt_arrays = params.arrays()
    if cfg.optimizer == "adam":
        optimizer = Adam(opt_arrays, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps)
    else:
        optimizer = Sgd(opt_arrays, cfg.learning_rate)

    report = TrainReport()
    start = time.perf_counter()
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(docs))
        num = 0.0
        den = 0.0
        for batch_index, lo in enumerate(range(0, len(order), cfg.batch_docs)):
            batch = [docs[i] for i in order[lo : lo + cfg.batch_docs]]
            loss, wsum, grads = model.batch_loss_grads(params, batch, weights)
            if not np.isfinite(loss) or any(
                not np.isfinite(g).all() for g in grads.values()
            ):
                raise NumericError(
                    f"non-finite loss or gradient at epoch {epoch}, batch {batch_index}"
                )
            num += loss * wsum
            den += wsum
            optimizer.step(grads)
        report.epoch_losses.append(num / den)
    report.wall_time = time.perf_counter() - start
    report.params_checksum = params_checksum(params)
    return params, report
