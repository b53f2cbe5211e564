"""Minimal neural-network core and the four model architectures."""

import numpy as np

from .archs import (
    ARCH_IDS,
    EVENT_CLASSES,
    GESTURE_CLASSES,
    INPUT_SPECS,
    build_model,
    conv_chain_lengths,
)
from .gradcheck import grad_check
from .layers import CovarianceFeatures
from .model import Model
from .training import TrainConfig, train
from .weights_io import apply_weights, load_model, load_weights, save_weights


def covariance_features(emg, subwindow=40, stride=12):
    """Flattened per-subwindow channel covariances: [C, L] -> [C*C, S]."""
    layer = CovarianceFeatures("cov", subwindow, stride)
    return layer.forward(np.asarray(emg)[None])[0]


__all__ = [
    "ARCH_IDS",
    "EVENT_CLASSES",
    "GESTURE_CLASSES",
    "INPUT_SPECS",
    "Model",
    "TrainConfig",
    "apply_weights",
    "build_model",
    "conv_chain_lengths",
    "covariance_features",
    "grad_check",
    "load_model",
    "load_weights",
    "save_weights",
    "train",
]
