"""Early mmWave blockage prediction with a passive guard beam.

A 2-D pre-shadowing channel simulator (LOS plus blocker-reflected paths),
a sliding-window standard-deviation detector, and experiment drivers for
field-of-view maps, detection-range estimation and threshold sweeps.
"""

from .beampattern import BeamPattern, BeamSpec, elements_for_hpbw, synthesize
from .channel import ChannelSample, NoiseModel, SceneConfig
from .detector import DetectionOutcome, DetectorConfig, OutcomeClass, detect, sliding_std
from .geometry import BlockerBody, BlockerPosition, LinkGeometry, blocker_angles
from .scenario import (
    ExperimentConfig,
    RangeEstimate,
    Trajectory,
    detection_range,
    fov_grid,
    prediction_time_stats,
    simulate_trajectory,
    threshold_sweep,
)

__all__ = [
    "BeamPattern",
    "BeamSpec",
    "BlockerBody",
    "BlockerPosition",
    "ChannelSample",
    "DetectionOutcome",
    "DetectorConfig",
    "ExperimentConfig",
    "LinkGeometry",
    "NoiseModel",
    "OutcomeClass",
    "RangeEstimate",
    "SceneConfig",
    "Trajectory",
    "blocker_angles",
    "detect",
    "detection_range",
    "elements_for_hpbw",
    "fov_grid",
    "prediction_time_stats",
    "simulate_trajectory",
    "sliding_std",
    "synthesize",
    "threshold_sweep",
]

__version__ = "0.1.0"
