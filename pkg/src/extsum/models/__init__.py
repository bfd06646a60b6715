"""Trainable sentence classifiers and their shared training machinery."""

from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .feedforward import FeedForwardParams, ffnn_forward
from .gradcheck import grad_check
from .logistic import LogisticParams, lr_forward
from .lstm import GateRecord, LstmParams, lstm_cell, lstm_forward
from .ops import bce_loss, class_weights, sigmoid
from .train import (
    MODEL_KINDS,
    DocSample,
    ModelSpec,
    TrainConfig,
    TrainReport,
    init_params,
    params_checksum,
    predict_probs,
    train,
)

__all__ = [
    "Checkpoint",
    "DocSample",
    "FeedForwardParams",
    "GateRecord",
    "LogisticParams",
    "LstmParams",
    "MODEL_KINDS",
    "ModelSpec",
    "TrainConfig",
    "TrainReport",
    "bce_loss",
    "class_weights",
    "ffnn_forward",
    "grad_check",
    "init_params",
    "load_checkpoint",
    "lr_forward",
    "lstm_cell",
    "lstm_forward",
    "params_checksum",
    "predict_probs",
    "save_checkpoint",
    "sigmoid",
    "train",
]
