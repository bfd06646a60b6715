"""Shared numeric pieces: sigmoid, binary cross-entropy, class weights, init."""

import numpy as np

from ..errors import DataError

PRED_EPS = 1e-7


def sigmoid(z):
    """1 / (1 + exp(-z)) with the overflow-safe branch for negative z.

    Accepts scalars or arrays; scalars come back as Python floats.
    """
    arr = np.asarray(z, dtype=np.float64)
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    ez = np.exp(arr[~pos])
    out[~pos] = ez / (1.0 + ez)
    if np.isscalar(z) or getattr(z, "ndim", 1) == 0:
        return float(out)
    return out


def bce_loss(preds, labels, weights: tuple[float, float] | None = None) -> float:
    """Weighted mean binary cross-entropy.

    preds are clamped to [PRED_EPS, 1 - PRED_EPS] before the logs; weights is
    an optional (w_neg, w_pos) pair and the mean is normalized by the total
    applied weight, so duplicating the minority class and weighting it are
    equivalent on identical predictions.
    """
    p = np.asarray(preds, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if p.shape != y.shape:
        raise ValueError(f"preds/labels length mismatch: {p.shape} vs {y.shape}")
    p = np.clip(p, PRED_EPS, 1.0 - PRED_EPS)
    per_example = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    if weights is None:
        return float(per_example.mean())
    w = np.where(y == 1.0, weights[1], weights[0])
    return float((w * per_example).sum() / w.sum())


def class_weights(labels, balanced: bool) -> tuple[float, float]:
    """(w_neg, w_pos); with balancing, w_pos = N/(2*N_pos) and w_neg = N/(2*N_neg)."""
    if not balanced:
        return (1.0, 1.0)
    y = np.asarray(labels)
    n = y.size
    n_pos = int((y == 1).sum())
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError(
            "class balancing needs at least one positive and one negative label "
            f"(got {n_pos} positive / {n_neg} negative)"
        )
    return (n / (2.0 * n_neg), n / (2.0 * n_pos))


def example_weights(y: np.ndarray, weights: tuple[float, float]) -> np.ndarray:
    return np.where(y == 1.0, weights[1], weights[0])


def weighted_bce_parts(
    p: np.ndarray, y: np.ndarray, weights: tuple[float, float]
) -> tuple[float, float]:
    """(sum of w * bce, sum of w) so batch losses can be merged exactly."""
    w = example_weights(y, weights)
    pc = np.clip(p, PRED_EPS, 1.0 - PRED_EPS)
    per_example = -(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc))
    return float((w * per_example).sum()), float(w.sum())


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)
