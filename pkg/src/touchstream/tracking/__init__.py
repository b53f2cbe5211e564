"""Wristband and fingertip tracking."""

from .fingertip import (
    CursorFuser,
    FingertipPostConfig,
    FingertipPostprocessor,
    OneEuroFilter,
)
from .orientation import OrientationConfig, OrientationState, orientation_update
from .wrist import (
    BiasConfig,
    DeadReckonConfig,
    DeadReckoner,
    IkConfig,
    IkEstimator,
    StationarityConfig,
    detect_stationary,
    estimate_bias,
)

__all__ = [
    "BiasConfig",
    "CursorFuser",
    "DeadReckonConfig",
    "DeadReckoner",
    "FingertipPostConfig",
    "FingertipPostprocessor",
    "IkConfig",
    "IkEstimator",
    "OneEuroFilter",
    "OrientationConfig",
    "OrientationState",
    "StationarityConfig",
    "detect_stationary",
    "estimate_bias",
    "orientation_update",
]
