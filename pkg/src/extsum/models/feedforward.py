"""Fully-connected feed-forward classifier with a sigmoid head.

Hidden layers compute h = f(W h_prev + b) with f in {relu, tanh}; the head
is a single sigmoid neuron over the last hidden layer.
"""

from dataclasses import dataclass

import numpy as np

from .ops import example_weights, glorot_uniform, sigmoid, weighted_bce_parts

ACTIVATIONS = ("relu", "tanh")


@dataclass
class DenseLayer:
    W: np.ndarray  # (d_out, d_in)
    b: np.ndarray  # (d_out,)
    activation: str


@dataclass
class FeedForwardParams:
    layers: list[DenseLayer]
    head_w: np.ndarray  # (d_last,)
    head_b: np.ndarray  # (1,)

    def __post_init__(self):
        prev = None
        for i, layer in enumerate(self.layers):
            if layer.activation not in ACTIVATIONS:
                raise ValueError(f"layer {i}: unknown activation {layer.activation!r}")
            d_out, d_in = layer.W.shape
            if layer.b.shape != (d_out,):
                raise ValueError(f"layer {i}: bias shape {layer.b.shape} != ({d_out},)")
            if prev is not None and d_in != prev:
                raise ValueError(
                    f"layer {i}: input dim {d_in} does not chain from previous {prev}"
                )
            prev = d_out
        if prev is not None and self.head_w.shape != (prev,):
            raise ValueError(
                f"head weights {self.head_w.shape} do not match last hidden ({prev},)"
            )

    def arrays(self) -> dict[str, np.ndarray]:
        out = {}
        for i, layer in enumerate(self.layers):
            out[f"layer{i}.W"] = layer.W
            out[f"layer{i}.b"] = layer.b
        out["head_w"] = self.head_w
        out["head_b"] = self.head_b
        return out


def init_params(
    rng: np.random.Generator,
    input_dim: int,
    hidden: tuple[int, ...],
    activation: str = "relu",
) -> FeedForwardParams:
    layers = []
    d_in = input_dim
    for width in hidden:
        layers.append(
            DenseLayer(
                W=glorot_uniform(rng, d_in, width, (width, d_in)),
                b=np.zeros(width, dtype=np.float64),
                activation=activation,
            )
        )
        d_in = width
    return FeedForwardParams(
        layers=layers,
        head_w=glorot_uniform(rng, d_in, 1, (d_in,)),
        head_b=np.zeros(1, dtype=np.float64),
    )


def from_arrays(
    arrays: dict[str, np.ndarray], hidden: tuple[int, ...], activation: str
) -> FeedForwardParams:
    layers = [
        DenseLayer(
            W=np.asarray(arrays[f"layer{i}.W"], dtype=np.float64),
            b=np.asarray(arrays[f"layer{i}.b"], dtype=np.float64),
            activation=activation,
        )
        for i in range(len(hidden))
    ]
    return FeedForwardParams(
        layers=layers,
        head_w=np.asarray(arrays["head_w"], dtype=np.float64),
        head_b=np.asarray(arrays["head_b"], dtype=np.float64),
    )


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _activate_grad(z: np.ndarray, a: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return (z > 0.0).astype(np.float64)
    return 1.0 - a * a


def _forward_cached(params: FeedForwardParams, X: np.ndarray):
    acts = [X]
    zs = []
    a = X
    for layer in params.layers:
        z = a @ layer.W.T + layer.b
        a = _activate(z, layer.activation)
        zs.append(z)
        acts.append(a)
    probs = sigmoid(a @ params.head_w + params.head_b[0])
    return probs, zs, acts


def ffnn_forward(params: FeedForwardParams, x: np.ndarray) -> float:
    """Probability for a single feature vector."""
    probs, _, _ = _forward_cached(params, np.asarray(x, dtype=np.float64)[None, :])
    return float(probs[0])


def forward_batch(params: FeedForwardParams, X: np.ndarray) -> np.ndarray:
    probs, _, _ = _forward_cached(params, X)
    return probs


def _flatten(docs) -> tuple[np.ndarray, np.ndarray]:
    return np.concatenate([d.X for d in docs]), np.concatenate([d.y for d in docs])


def batch_loss(params, docs, weights) -> tuple[float, float]:
    X, y = _flatten(docs)
    num, den = weighted_bce_parts(forward_batch(params, X), y, weights)
    return num / den, den


def batch_loss_grads(params, docs, weights):
    X, y = _flatten(docs)
    p, zs, acts = _forward_cached(params, X)
    num, den = weighted_bce_parts(p, y, weights)

    grads: dict[str, np.ndarray] = {}
    dz_head = example_weights(y, weights) * (p - y) / den  # (m,)
    grads["head_w"] = acts[-1].T @ dz_head
    grads["head_b"] = np.array([dz_head.sum()])
    da = np.outer(dz_head, params.head_w)
    for i in range(len(params.layers) - 1, -1, -1):
        layer = params.layers[i]
        dz = da * _activate_grad(zs[i], acts[i + 1], layer.activation)
        grads[f"layer{i}.W"] = dz.T @ acts[i]
        grads[f"layer{i}.b"] = dz.sum(axis=0)
        if i > 0:
            da = dz @ layer.W
    return num / den, den, grads
