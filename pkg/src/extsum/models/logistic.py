"""Logistic regression: sigmoid(w.x + b) trained with weighted BCE."""

from dataclasses import dataclass

import numpy as np

from .ops import example_weights, glorot_uniform, sigmoid, weighted_bce_parts


@dataclass
class LogisticParams:
    w: np.ndarray  # (n,)
    b: np.ndarray  # (1,)

    def arrays(self) -> dict[str, np.ndarray]:
        return {"w": self.w, "b": self.b}


def init_params(rng: np.random.Generator, input_dim: int) -> LogisticParams:
    return LogisticParams(
        w=glorot_uniform(rng, input_dim, 1, (input_dim,)),
        b=np.zeros(1, dtype=np.float64),
    )


def from_arrays(arrays: dict[str, np.ndarray]) -> LogisticParams:
    return LogisticParams(
        w=np.asarray(arrays["w"], dtype=np.float64),
        b=np.asarray(arrays["b"], dtype=np.float64),
    )


def lr_forward(params: LogisticParams, x: np.ndarray) -> float:
    """P(y=1 | x) for a single feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != params.w.shape:
        raise ValueError(f"feature dim {x.shape} does not match weights {params.w.shape}")
    return sigmoid(float(params.w @ x) + float(params.b[0]))


def forward_batch(params: LogisticParams, X: np.ndarray) -> np.ndarray:
    return sigmoid(X @ params.w + params.b[0])


def _flatten(docs) -> tuple[np.ndarray, np.ndarray]:
    X = np.concatenate([d.X for d in docs])
    y = np.concatenate([d.y for d in docs])
    return X, y


def batch_loss(params, docs, weights) -> tuple[float, float]:
    X, y = _flatten(docs)
    num, den = weighted_bce_parts(forward_batch(params, X), y, weights)
    return num / den, den


def batch_loss_grads(params, docs, weights):
    X, y = _flatten(docs)
    p = forward_batch(params, X)
    num, den = weighted_bce_parts(p, y, weights)
    dz = example_weights(y, weights) * (p - y) / den
    grads = {"w": X.T @ dz, "b": np.array([dz.sum()])}
    return num / den, den, grads
