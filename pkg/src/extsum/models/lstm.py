"""Uni- and bi-directional LSTM sentence classifiers, trained with BPTT.

One sequence is one document (its sentences in order).  Each direction
carries its own gate parameters:

    f_t = sigma(W_f x_t + U_f h_{t-1} + b_f)        forget gate
    i_t = sigma(W_i x_t + U_i h_{t-1} + b_i)        input gate
    c~_t = tanh(W_c x_t + U_c h_{t-1} + b_c)        candidate cell state
    c_t = f_t * c_{t-1} + i_t * c~_t                updated cell state
    o_t = sigma(W_o x_t + U_o h_{t-1} + b_o)        output gate
    h_t = o_t * tanh(c_t)                           updated hidden state

A dense sigmoid head over h_t (uni) or [h_fwd | h_bwd] (bi) gives the
per-sentence inclusion probability.  Masks mark valid steps; padding is
tail-only and contributes nothing to the loss or the gradients.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ops import example_weights, glorot_uniform, sigmoid, weighted_bce_parts

GATES = ("f", "i", "c", "o")


@dataclass
class LstmDirection:
    """Gate parameters for one scan direction."""

    W_f: np.ndarray
    W_i: np.ndarray
    W_c: np.ndarray
    W_o: np.ndarray
    U_f: np.ndarray
    U_i: np.ndarray
    U_c: np.ndarray
    U_o: np.ndarray
    b_f: np.ndarray
    b_i: np.ndarray
    b_c: np.ndarray
    b_o: np.ndarray

    @property
    def hidden_size(self) -> int:
        return self.W_f.shape[0]


@dataclass
class LstmParams:
    fwd: LstmDirection
    bwd: Optional[LstmDirection]  # None for the uni-directional variant
    head_w: np.ndarray  # (d,) uni or (2d,) bi
    head_b: np.ndarray  # (1,)

    @property
    def bidirectional(self) -> bool:
        return self.bwd is not None

    @property
    def hidden_size(self) -> int:
        return self.fwd.hidden_size

    def arrays(self) -> dict[str, np.ndarray]:
        out = {}
        directions = [("fwd", self.fwd)]
        if self.bwd is not None:
            directions.append(("bwd", self.bwd))
        for prefix, direction in directions:
            for gate in GATES:
                out[f"{prefix}.W_{gate}"] = getattr(direction, f"W_{gate}")
                out[f"{prefix}.U_{gate}"] = getattr(direction, f"U_{gate}")
                out[f"{prefix}.b_{gate}"] = getattr(direction, f"b_{gate}")
        out["head_w"] = self.head_w
        out["head_b"] = self.head_b
        return out


@dataclass
class GateRecord:
    """Gate activations of one cell step (each in (0,1); candidate in (-1,1))."""

    f: np.ndarray
    i: np.ndarray
    c_tilde: np.ndarray
    o: np.ndarray


def _init_direction(rng: np.random.Generator, input_dim: int, d: int) -> LstmDirection:
    fields = {}
    for gate in GATES:
        fields[f"W_{gate}"] = glorot_uniform(rng, input_dim, d, (d, input_dim))
        fields[f"U_{gate}"] = glorot_uniform(rng, d, d, (d, d))
        # Forget-gate bias starts at 1 so early training does not flush memory.
        fields[f"b_{gate}"] = np.ones(d) if gate == "f" else np.zeros(d)
    return LstmDirection(**fields)


def init_params(
    rng: np.random.Generator, input_dim: int, hidden_size: int, bidirectional: bool
) -> LstmParams:
    fwd = _init_direction(rng, input_dim, hidden_size)
    bwd = _init_direction(rng, input_dim, hidden_size) if bidirectional else None
    head_in = 2 * hidden_size if bidirectional else hidden_size
    return LstmParams(
        fwd=fwd,
        bwd=bwd,
        head_w=glorot_uniform(rng, head_in, 1, (head_in,)),
        head_b=np.zeros(1, dtype=np.float64),
    )


def from_arrays(
    arrays: dict[str, np.ndarray], hidden_size: int, bidirectional: bool
) -> LstmParams:
    def direction(prefix: str) -> LstmDirection:
        fields = {}
        for gate in GATES:
            for kind in ("W", "U", "b"):
                fields[f"{kind}_{gate}"] = np.asarray(
                    arrays[f"{prefix}.{kind}_{gate}"], dtype=np.float64
                )
        return LstmDirection(**fields)

    params = LstmParams(
        fwd=direction("fwd"),
        bwd=direction("bwd") if bidirectional else None,
        head_w=np.asarray(arrays["head_w"], dtype=np.float64),
        head_b=np.asarray(arrays["head_b"], dtype=np.float64),
    )
    if params.hidden_size != hidden_size:
        raise ValueError(
            f"checkpoint hidden size {params.hidden_size} != expected {hidden_size}"
        )
    return params


def lstm_cell(
    direction: LstmDirection,
    x_t: np.ndarray,
    h_prev: np.ndarray,
    c_prev: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, GateRecord]:
    """One step of the six gate/state equations."""
    x_t = np.asarray(x_t, dtype=np.float64)
    f = sigmoid(direction.W_f @ x_t + direction.U_f @ h_prev + direction.b_f)
    i = sigmoid(direction.W_i @ x_t + direction.U_i @ h_prev + direction.b_i)
    c_tilde = np.tanh(direction.W_c @ x_t + direction.U_c @ h_prev + direction.b_c)
    c_t = f * c_prev + i * c_tilde
    o = sigmoid(direction.W_o @ x_t + direction.U_o @ h_prev + direction.b_o)
    h_t = o * np.tanh(c_t)
    return h_t, c_t, GateRecord(f=f, i=i, c_tilde=c_tilde, o=o)


def _valid_length(seq_len: int, mask) -> int:
    """Masks are tail-only: a run of 1s followed by a run of 0s."""
    if mask is None:
        return seq_len
    mask = np.asarray(mask)
    if mask.shape[0] > seq_len:
        raise ValueError(f"mask length {mask.shape[0]} exceeds sequence length {seq_len}")
    length = int(mask.sum())
    if not np.array_equal(mask, np.concatenate([np.ones(length), np.zeros(mask.shape[0] - length)])):
        raise ValueError("mask must be a run of 1s followed by a run of 0s")
    return length


class _Scan:
    """Forward pass of one direction over the valid steps, cached for BPTT."""

    def __init__(self, direction: LstmDirection, X: np.ndarray, reverse: bool):
        d = direction.hidden_size
        length = X.shape[0]
        order = range(length - 1, -1, -1) if reverse else range(length)
        self.direction = direction
        self.order = list(order)
        self.h = np.zeros((length, d))
        self.c = np.zeros((length, d))
        self.h_prev = np.zeros((length, d))
        self.c_prev = np.zeros((length, d))
        self.gates: list[Optional[GateRecord]] = [None] * length
        h = np.zeros(d)
        c = np.zeros(d)
        for t in self.order:
            self.h_prev[t] = h
            self.c_prev[t] = c
            h, c, rec = lstm_cell(direction, X[t], h, c)
            self.h[t] = h
            self.c[t] = c
            self.gates[t] = rec

    def backward(self, dh_head: np.ndarray, X: np.ndarray) -> dict[str, np.ndarray]:
        """BPTT: dh_head is dLoss/dh_t from the head at every valid step."""
        direction = self.direction
        d = direction.hidden_size
        grads = {
            f"{kind}_{gate}": np.zeros_like(getattr(direction, f"{kind}_{gate}"))
            for gate in GATES
            for kind in ("W", "U", "b")
        }
        dh_next = np.zeros(d)
        dc_next = np.zeros(d)
        for t in reversed(self.order):
            rec = self.gates[t]
            tanh_c = np.tanh(self.c[t])
            dh = dh_head[t] + dh_next
            do = dh * tanh_c
            dz_o = do * rec.o * (1.0 - rec.o)
            dc = dh * rec.o * (1.0 - tanh_c * tanh_c) + dc_next
            df = dc * self.c_prev[t]
            dz_f = df * rec.f * (1.0 - rec.f)
            di = dc * rec.c_tilde
            dz_i = di * rec.i * (1.0 - rec.i)
            dc_tilde = dc * rec.i
            dz_c = dc_tilde * (1.0 - rec.c_tilde * rec.c_tilde)
            x_t = X[t]
            h_prev = self.h_prev[t]
            for gate, dz in (("f", dz_f), ("i", dz_i), ("c", dz_c), ("o", dz_o)):
                grads[f"W_{gate}"] += np.outer(dz, x_t)
                grads[f"U_{gate}"] += np.outer(dz, h_prev)
                grads[f"b_{gate}"] += dz
            dh_next = (
                direction.U_f.T @ dz_f
                + direction.U_i.T @ dz_i
                + direction.U_c.T @ dz_c
                + direction.U_o.T @ dz_o
            )
            dc_next = dc * rec.f
        return grads


def _head_states(params: LstmParams, X: np.ndarray) -> tuple[np.ndarray, list[_Scan]]:
    scans = [_Scan(params.fwd, X, reverse=False)]
    if params.bwd is not None:
        scans.append(_Scan(params.bwd, X, reverse=True))
    states = np.concatenate([scan.h for scan in scans], axis=1)
    return states, scans


def lstm_forward(params: LstmParams, seq, mask=None) -> np.ndarray:
    """Per-step inclusion probabilities for one document sequence.

    Masked (padded) tail steps come back as 0.0 and contribute nothing
    downstream.
    """
    X = np.asarray(seq, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("sequence must be a nonempty (steps, features) array")
    length = _valid_length(X.shape[0], mask)
    probs = np.zeros(X.shape[0])
    if length == 0:
        return probs
    states, _ = _head_states(params, X[:length])
    probs[:length] = sigmoid(states @ params.head_w + params.head_b[0])
    return probs


def forward_batch(params: LstmParams, X: np.ndarray) -> np.ndarray:
    return lstm_forward(params, X)


def batch_loss(params, docs, weights) -> tuple[float, float]:
    num = 0.0
    den = 0.0
    for doc in docs:
        length = _valid_length(doc.X.shape[0], getattr(doc, "mask", None))
        states, _ = _head_states(params, doc.X[:length])
        p = sigmoid(states @ params.head_w + params.head_b[0])
        n, d = weighted_bce_parts(p, doc.y[:length], weights)
        num += n
        den += d
    return num / den, den


def batch_loss_grads(params, docs, weights):
    cached = []
    num = 0.0
    den = 0.0
    for doc in docs:
        length = _valid_length(doc.X.shape[0], getattr(doc, "mask", None))
        X = doc.X[:length]
        y = doc.y[:length]
        states, scans = _head_states(params, X)
        p = sigmoid(states @ params.head_w + params.head_b[0])
        n, d = weighted_bce_parts(p, y, weights)
        num += n
        den += d
        cached.append((X, y, p, states, scans))

    grads = {name: np.zeros_like(arr) for name, arr in params.arrays().items()}
    d_hidden = params.hidden_size
    for X, y, p, states, scans in cached:
        dz = example_weights(y, weights) * (p - y) / den  # (L,)
        grads["head_w"] += states.T @ dz
        grads["head_b"] += np.array([dz.sum()])
        d_states = np.outer(dz, params.head_w)  # (L, d or 2d)
        for k, (prefix, scan) in enumerate(
            [("fwd", scans[0])] + ([("bwd", scans[1])] if params.bwd is not None else [])
        ):
            dh_head = d_states[:, k * d_hidden : (k + 1) * d_hidden]
            for name, grad in scan.backward(dh_head, X).items():
                grads[f"{prefix}.{name}"] += grad
    return num / den, den, grads
