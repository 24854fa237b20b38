"""Sliding-std detector: streaming equivalence, latching, calibration, classes."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guardbeam.detector import (
    DetectorConfig,
    OutcomeClass,
    SlidingStd,
    StreamingDetector,
    calibrate_threshold,
    classify,
    detect,
    sliding_std,
)
from guardbeam.errors import CalibrationError, InsufficientDataError, InvalidConfigError

CFG = DetectorConfig(threshold=0.03)


def two_pass_std(levels, window):
    """Reference: trailing-window population std by direct recomputation."""
    levels = np.asarray(levels, dtype=float)
    out = np.full(levels.shape, np.nan)
    for i in range(window - 1, levels.size):
        out[i] = np.std(levels[i - window + 1 : i + 1])
    return out


def test_config_window_samples():
    assert CFG.window_samples == 10


def test_config_validation():
    with pytest.raises(InvalidConfigError):
        DetectorConfig(threshold=0.0)
    with pytest.raises(InvalidConfigError):
        DetectorConfig(threshold=0.03, window_ms=105)
    with pytest.raises(InvalidConfigError):
        DetectorConfig(threshold=0.03, window_ms=10, sample_interval_ms=10)
    with pytest.raises(InvalidConfigError):
        DetectorConfig(threshold=0.03, sample_interval_ms=0)
    with pytest.raises(InvalidConfigError):
        DetectorConfig(threshold=0.03, beam_subset=())


def test_sliding_std_matches_two_pass():
    rng = np.random.default_rng(0)
    levels = 1.0 + 0.01 * rng.standard_normal(500)
    got = sliding_std(levels, 10)
    ref = two_pass_std(levels, 10)
    assert np.all(np.isnan(got[:9]))
    assert np.allclose(got[9:], ref[9:], rtol=1e-9, atol=1e-15)


def test_sliding_std_constant_trace_is_zero():
    got = sliding_std(np.full(50, 3.7), 10)
    assert np.allclose(got[9:], 0.0, atol=1e-12)


def test_sliding_std_large_offset_stays_conditioned():
    # A huge baseline must not wreck the variance via catastrophic cancellation.
    rng = np.random.default_rng(1)
    levels = 1e9 + 0.01 * rng.standard_normal(200)
    got = sliding_std(levels, 20)
    ref = two_pass_std(levels, 20)
    assert np.allclose(got[19:], ref[19:], rtol=1e-9, atol=1e-12)


@given(
    data=st.lists(st.floats(min_value=-10.0, max_value=10.0), min_size=12, max_size=60),
    window=st.integers(min_value=2, max_value=10),
)
@settings(max_examples=150)
def test_sliding_std_property(data, window):
    got = sliding_std(data, window)
    ref = two_pass_std(data, window)
    mask = ~np.isnan(ref)
    # Running sums leave eps-scale residue after large samples leave the
    # window, so a zero-variance window can read as ~1e-7 instead of 0.
    assert np.allclose(got[mask], ref[mask], rtol=1e-8, atol=1e-6)


def test_sliding_std_rejects_tiny_window():
    with pytest.raises(InvalidConfigError):
        SlidingStd(1)


def test_streaming_matches_batch_detect():
    rng = np.random.default_rng(7)
    for _ in range(50):
        levels = 1.0 + 0.005 * rng.standard_normal(120)
        j = int(rng.integers(20, 100))
        levels[j:] += 0.2 * rng.standard_normal(120 - j)
        batch = detect(levels, CFG)
        stream = StreamingDetector(CFG)
        t_d = None
        for x in levels:
            hit = stream.push(float(x))
            if hit is not None:
                t_d = hit
                break
        assert batch.triggered == stream.triggered
        assert batch.t_d_ms == t_d


def test_detect_trailing_edge_timestamp():
    # A step at sample 30 enters the 10-sample window at index 30 exactly.
    levels = np.zeros(60)
    levels[30:] = 1.0
    out = detect(levels + 1.0, CFG)
    assert out.triggered
    assert out.t_d_ms == 300


def test_detect_is_latched_first_crossing():
    levels = np.ones(80)
    levels[20] = 2.0
    levels[60] = 5.0
    out = detect(levels, CFG)
    assert out.t_d_ms == 200


def test_detect_quiet_trace_never_triggers():
    out = detect(np.ones(50), CFG)
    assert not out.triggered
    assert out.t_d_ms is None


def test_detect_insufficient_data():
    with pytest.raises(InsufficientDataError):
        detect(np.ones(5), CFG)


def test_threshold_monotonicity_property():
    rng = np.random.default_rng(11)
    levels = 1.0 + 0.01 * rng.standard_normal(200)
    levels[100:] += np.linspace(0.0, 0.5, 100) * rng.standard_normal(100)
    previous = -1
    for th in np.linspace(0.005, 0.4, 20):
        out = detect(levels, DetectorConfig(threshold=float(th)))
        t_d = out.t_d_ms if out.triggered else 10**9
        assert t_d >= previous
        previous = t_d


def test_scale_covariance():
    # Scaling levels and threshold together leaves t_d unchanged.
    rng = np.random.default_rng(13)
    levels = 1.0 + 0.01 * rng.standard_normal(150)
    levels[80:] += 0.3
    base = detect(levels, DetectorConfig(threshold=0.05))
    for c in (1e-3, 1e3):
        scaled = detect(levels * c, DetectorConfig(threshold=0.05 * c))
        assert scaled.t_d_ms == base.t_d_ms


def test_calibrate_threshold_oracle():
    rng = np.random.default_rng(17)
    quiet = 1.0 + 0.004 * rng.standard_normal(5000)
    th = calibrate_threshold(quiet, 10, multiplier=1.2)
    sigma = two_pass_std(quiet, 10)
    expected = 1.2 * np.nanpercentile(sigma, 99.0)
    assert th == pytest.approx(expected, rel=1e-9)
    # A quiescent trace stays below its own calibrated threshold almost always.
    frac = np.mean(sigma[~np.isnan(sigma)] >= th)
    assert frac < 0.02


def test_calibrate_threshold_needs_enough_samples():
    with pytest.raises(CalibrationError):
        calibrate_threshold(np.ones(50), 10)


def test_classify_true_detection():
    out = classify(True, t_d_ms=500, t_s_ms=900, eligibility_start_ms=300)
    assert out.outcome_class is OutcomeClass.TRUE_DETECTION
    assert out.t_p_ms == 400


def test_classify_early_trigger_is_false_detection():
    out = classify(True, t_d_ms=100, t_s_ms=900, eligibility_start_ms=300)
    assert out.outcome_class is OutcomeClass.FALSE_DETECTION
    assert out.t_p_ms == 800


def test_classify_trigger_without_event_is_false_detection():
    out = classify(True, t_d_ms=100, t_s_ms=None)
    assert out.outcome_class is OutcomeClass.FALSE_DETECTION
    assert out.t_p_ms is None


def test_classify_missed_event():
    out = classify(False, t_d_ms=None, t_s_ms=900)
    assert out.outcome_class is OutcomeClass.MISDETECTION


def test_classify_no_event_no_trigger():
    out = classify(False, t_d_ms=None, t_s_ms=None)
    assert out.outcome_class is OutcomeClass.NO_EVENT
    assert not out.triggered
