"""Synthetic scenario scripting and sensor stream generation."""

from .labels import (
    DEFAULT_TOLERANCE_S,
    LABEL_NULL,
    LABEL_OFFSET,
    LABEL_ONSET,
    export_labels,
    label_for_times,
)
from .scenario import (
    GroundTruth,
    ScenarioSpec,
    Segment,
    SimEvent,
    scenario_from_yaml,
    scenario_to_yaml,
    script_scenario,
)
from .sensors import SensorParams, synthesize_streams

__all__ = [
    "DEFAULT_TOLERANCE_S",
    "GroundTruth",
    "LABEL_NULL",
    "LABEL_OFFSET",
    "LABEL_ONSET",
    "ScenarioSpec",
    "Segment",
    "SensorParams",
    "SimEvent",
    "export_labels",
    "label_for_times",
    "scenario_from_yaml",
    "scenario_to_yaml",
    "script_scenario",
    "synthesize_streams",
]
