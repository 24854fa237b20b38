"""ULA synthesis: array factor, beamwidth measurement, element-count search."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guardbeam.beampattern import (
    ISOTROPIC,
    MAX_ELEMENTS,
    BeamPattern,
    BeamSpec,
    array_factor,
    elements_for_hpbw,
    measure_hpbw_deg,
    synthesize,
)
from guardbeam.errors import CapabilityError, InvalidConfigError


def test_array_factor_peak_at_steering():
    for steer in (0.0, math.radians(14.0)):
        assert array_factor(steer, 8, steering_rad=steer) == pytest.approx(1.0, abs=1e-12)


def test_array_factor_closed_form():
    # Compare against direct evaluation of the two-sine quotient off the peak.
    n, theta = 8, 0.3
    psi = 2.0 * math.pi * 0.5 * math.sin(theta)
    expected = abs(math.sin(n * psi / 2.0) / (n * math.sin(psi / 2.0)))
    assert array_factor(theta, n) == pytest.approx(expected, rel=1e-12)


@given(
    theta=st.floats(min_value=-math.pi / 2, max_value=math.pi / 2),
    n=st.integers(min_value=1, max_value=64),
)
@settings(max_examples=200)
def test_array_factor_bounded(theta, n):
    g = float(array_factor(theta, n))
    assert 0.0 <= g <= 1.0 + 1e-12


def test_array_factor_first_null():
    # Broadside null of an N-element half-wavelength array at sin(theta) = 2/N.
    n = 8
    theta_null = math.asin(2.0 / n)
    assert array_factor(theta_null, n) <= 1e-9


def test_array_factor_vectorized():
    theta = np.linspace(-1.0, 1.0, 11)
    out = array_factor(theta, 8)
    assert out.shape == theta.shape
    assert out[5] == pytest.approx(1.0)


def test_hpbw_two_elements_is_60_degrees():
    # cos(pi/2 sin(theta)) drops to half power at sin(theta) = 1/2 exactly.
    assert measure_hpbw_deg(2) == pytest.approx(60.0, abs=1e-3)


def test_hpbw_shrinks_with_elements():
    widths = [measure_hpbw_deg(n) for n in (2, 4, 8, 16, 32)]
    assert all(a > b for a, b in zip(widths, widths[1:]))


def test_hpbw_single_element_isotropic():
    assert measure_hpbw_deg(1) == 360.0


def test_hpbw_matches_halfpower_definition():
    # The power pattern is 0.5 at half the measured width, to bisection accuracy.
    for n in (5, 15):
        half = math.radians(measure_hpbw_deg(n) / 2.0)
        assert float(array_factor(half, n)) ** 2 == pytest.approx(0.5, abs=1e-6)


def test_elements_for_hpbw_minimal():
    for req in (7.0, 13.0, 101.5):
        n = elements_for_hpbw(req)
        assert measure_hpbw_deg(n) <= req
        if n > 2:
            assert measure_hpbw_deg(n - 1) > req


def test_elements_for_known_widths():
    assert elements_for_hpbw(101.5) == 2
    assert elements_for_hpbw(13.0) == 8
    assert elements_for_hpbw(7.0) == 15


def test_elements_for_hpbw_unattainable():
    limit = measure_hpbw_deg(MAX_ELEMENTS)
    with pytest.raises(CapabilityError):
        elements_for_hpbw(limit * 0.5)


def test_elements_for_hpbw_rejects_bad_request():
    with pytest.raises(InvalidConfigError):
        elements_for_hpbw(0.0)
    with pytest.raises(InvalidConfigError):
        elements_for_hpbw(180.0)


def test_beam_spec_validation():
    with pytest.raises(InvalidConfigError):
        BeamSpec(hpbw_deg=7.0, steering_deg=5.0, role="rx_main")
    with pytest.raises(InvalidConfigError):
        BeamSpec(hpbw_deg=7.0, role="sidelobe")
    with pytest.raises(InvalidConfigError):
        BeamSpec(hpbw_deg=-1.0)


def test_synthesize_respects_request():
    pat = synthesize(BeamSpec(hpbw_deg=7.0, role="rx_main"))
    assert pat.n_elements == 15
    assert pat.hpbw_measured_deg <= 7.0
    assert 0.0 <= pat.hpbw_residual_deg < 1.0


def test_synthesize_steered_guard():
    pat = synthesize(BeamSpec(hpbw_deg=7.0, steering_deg=14.0, role="rx_guard"))
    assert pat.steering_rad == pytest.approx(math.radians(14.0))
    assert pat.gain(math.radians(14.0)) == pytest.approx(1.0, abs=1e-12)
    assert pat.gain(0.0) < 0.3


def test_steered_gain_is_shifted_broadside_in_sine_space():
    pat = synthesize(BeamSpec(hpbw_deg=13.0, steering_deg=7.0, role="rx_guard"))
    ref = BeamPattern(n_elements=pat.n_elements)
    theta = 0.2
    shifted = math.asin(math.sin(theta) - math.sin(pat.steering_rad))
    assert float(pat.gain(theta)) == pytest.approx(float(ref.gain(shifted)), rel=1e-9)


def test_isotropic_pattern_flat():
    theta = np.linspace(-math.pi / 2, math.pi / 2, 7)
    assert np.allclose(ISOTROPIC.gain(theta), 1.0)
