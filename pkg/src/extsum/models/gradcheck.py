"""Analytic-gradient verification against central finite differences."""

import numpy as np

from .train import ModelSpec, model_module

DEFAULT_STEP = 1e-5
# Relative-error denominators are floored so float64 roundoff on near-zero
# partials cannot dominate the max; genuine gradient bugs show up at O(1).
DENOM_FLOOR = 1e-4


def relu_kink_clearance(spec: ModelSpec, params, docs) -> float:
    """Smallest |pre-activation| across hidden relu units for a batch.

    Central differences are meaningless across the relu kink, so checks on
    relu networks should redraw cases whose clearance is within a few
    orders of magnitude of the step.
    """
    if spec.kind != "ffnn" or spec.activation != "relu":
        return float("inf")
    model = model_module(spec.kind)
    X = np.concatenate([d.X for d in docs])
    _, zs, _ = model._forward_cached(params, X)
    return min(float(np.abs(z).min()) for z in zs)


def grad_check(spec: ModelSpec, params, docs, step: float = DEFAULT_STEP) -> float:
    """Max relative error between analytic and numeric partials.

    Every parameter coordinate is perturbed by +-step and the unweighted
    BCE batch loss re-evaluated; the analytic side comes from the model's
    backward pass.
    """
    model = model_module(spec.kind)
    weights = (1.0, 1.0)
    _, _, grads = model.batch_loss_grads(params, docs, weights)
    max_rel = 0.0
    for name, arr in params.arrays().items():
        flat = arr.reshape(-1)
        gflat = np.asarray(grads[name]).reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + step
            loss_plus, _ = model.batch_loss(params, docs, weights)
            flat[idx] = orig - step
            loss_minus, _ = model.batch_loss(params, docs, weights)
            flat[idx] = orig
            numeric = (loss_plus - loss_minus) / (2.0 * step)
            analytic = gflat[idx]
            rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), DENOM_FLOOR)
            if rel > max_rel:
                max_rel = rel
    return float(max_rel)
