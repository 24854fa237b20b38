"""Sliding-window standard-deviation blockage detector.

The detector watches the combined received level z_t and triggers the first
time the population standard deviation over the trailing window of
W = window_ms / sample_interval_ms samples reaches the threshold.  Detection
is latched: the first crossing ends the run.  Timestamps are the trailing
edge of the window (the time of the newest sample).
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError, InsufficientDataError, InvalidConfigError


@dataclass(frozen=True)
class DetectorConfig:
    """Window length, sampling stride, threshold and observed beam subset."""

    threshold: float
    window_ms: int = 100
    sample_interval_ms: int = 10
    beam_subset: tuple[str, ...] = ("main",)

    def __post_init__(self) -> None:
        if self.sample_interval_ms <= 0:
            raise InvalidConfigError("sample interval must be positive")
        if self.window_ms % self.sample_interval_ms != 0:
            raise InvalidConfigError("window must be an integer multiple of the sample interval")
        if self.window_samples < 2:
            raise InvalidConfigError("window must span at least 2 samples")
        if not self.threshold > 0.0:
            raise InvalidConfigError("threshold must be positive")
        if not self.beam_subset:
            raise InvalidConfigError("beam subset must be non-empty")

    @property
    def window_samples(self) -> int:
        return self.window_ms // self.sample_interval_ms


class SlidingStd:
    """Streaming population standard deviation over a fixed trailing window.

    Sums are kept relative to the first pushed value, which conditions the
    running quantities well for level traces that hover near a baseline.
    """

    def __init__(self, window: int):
        if window < 2:
            raise InvalidConfigError("window must be >= 2 samples")
        self.window = window
        self._buf: deque[float] = deque(maxlen=window)
        self._shift: float | None = None
        self._sum = 0.0
        self._sumsq = 0.0

    def push(self, x: float) -> float | None:
        """Add one sample; returns the window std, or None during warm-up."""
        x = float(x)
        if self._shift is None:
            self._shift = x
        v = x - self._shift
        if len(self._buf) == self.window:
            old = self._buf[0]
            self._sum -= old
            self._sumsq -= old * old
        self._buf.append(v)
        self._sum += v
        self._sumsq += v * v
        if len(self._buf) < self.window:
            return None
        w = self.window
        var = (self._sumsq - self._sum * self._sum / w) / w
        return float(np.sqrt(max(var, 0.0)))


def sliding_std(levels, window: int) -> np.ndarray:
    """Trailing-window population std per index; NaN over the warm-up prefix."""
    levels = np.asarray(levels, dtype=float)
    out = np.full(levels.shape, np.nan)
    tracker = SlidingStd(window)
    for i, x in enumerate(levels):
        sigma = tracker.push(x)
        if sigma is not None:
            out[i] = sigma
    return out


class OutcomeClass(str, enum.Enum):
    TRUE_DETECTION = "true_detection"
    FALSE_DETECTION = "false_detection"
    MISDETECTION = "misdetection"
    NO_EVENT = "no_event"


@dataclass(frozen=True)
class DetectionOutcome:
    """Trigger flag, detection/shadowing/prediction times and outcome class."""

    triggered: bool
    t_d_ms: int | None = None
    t_s_ms: int | None = None
    t_p_ms: int | None = None
    outcome_class: OutcomeClass | None = None


class StreamingDetector:
    """Single-stream state machine running the threshold crossing online."""

    def __init__(self, cfg: DetectorConfig):
        self.cfg = cfg
        self._std = SlidingStd(cfg.window_samples)
        self._index = -1
        self.t_d_ms: int | None = None

    @property
    def triggered(self) -> bool:
        return self.t_d_ms is not None

    def push(self, level: float) -> int | None:
        """Feed one sample; returns t_d in ms on the first crossing."""
        self._index += 1
        sigma = self._std.push(level)
        if self.triggered or sigma is None:
            return None
        if sigma >= self.cfg.threshold:
            self.t_d_ms = self._index * self.cfg.sample_interval_ms
            return self.t_d_ms
        return None


def detect(levels, cfg: DetectorConfig) -> DetectionOutcome:
    """Batch detection over a full level trace (first crossing only)."""
    levels = np.asarray(levels, dtype=float)
    if levels.size < cfg.window_samples:
        raise InsufficientDataError(
            f"trace has {levels.size} samples, window needs {cfg.window_samples}"
        )
    det = StreamingDetector(cfg)
    for x in levels:
        if det.push(float(x)) is not None:
            break
    return DetectionOutcome(triggered=det.triggered, t_d_ms=det.t_d_ms)


def calibrate_threshold(quiescent_levels, window: int, multiplier: float = 1.2) -> float:
    """Threshold from a blocker-free trace: multiplier x 99th pct of sigma(t)."""
    quiescent_levels = np.asarray(quiescent_levels, dtype=float)
    if quiescent_levels.size < 10 * window:
        raise CalibrationError(
            f"need at least {10 * window} quiescent samples, got {quiescent_levels.size}"
        )
    sigma = sliding_std(quiescent_levels, window)
    return float(multiplier * np.nanpercentile(sigma, 99.0))


def classify(
    triggered: bool,
    t_d_ms: int | None,
    t_s_ms: int | None,
    eligibility_start_ms: int | None = None,
) -> DetectionOutcome:
    """Assemble the outcome class from detector output and scene truth.

    A trigger earlier than the eligibility start (blocker too far from the
    link to matter) counts as a false detection.
    """
    t_p_ms = None
    if triggered and t_d_ms is not None and t_s_ms is not None:
        t_p_ms = t_s_ms - t_d_ms
    if triggered:
        early = eligibility_start_ms is not None and t_d_ms < eligibility_start_ms
        if t_s_ms is None or early:
            cls = OutcomeClass.FALSE_DETECTION
        elif t_d_ms < t_s_ms:
            cls = OutcomeClass.TRUE_DETECTION
        else:
            cls = OutcomeClass.MISDETECTION
    else:
        cls = OutcomeClass.MISDETECTION if t_s_ms is not None else OutcomeClass.NO_EVENT
    return DetectionOutcome(
        triggered=triggered,
        t_d_ms=t_d_ms,
        t_s_ms=t_s_ms,
        t_p_ms=t_p_ms,
        outcome_class=cls,
    )
