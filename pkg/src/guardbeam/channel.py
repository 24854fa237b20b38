"""Pre-shadowing channel: LOS plus blocker-reflected components per beam.

Each path contributes g_T * g_R * Gamma * lambda/(4 pi d) * exp(-j 2 pi d / lambda),
where the amplitude gains are sqrt(N_e) times the normalized array factor
(standard ULA directivity scaling) so that wider synthesized beams carry
less gain.  All angles are measured from the LOS direction, signed positive
on the guard side; a pattern's steering is baked into its array factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .beampattern import BeamPattern
from .errors import (
    GeometryDomainError,
    InvalidCalibrationError,
    InvalidConfigError,
    OutOfModelError,
)
from .geometry import BlockerBody, LinkGeometry, blocker_angles, in_shadowing_area

SPEED_OF_LIGHT = 299792458.0


@dataclass(frozen=True)
class SceneConfig:
    """Carrier, power, reflector and noise parameters of one scene."""

    frequency_hz: float = 26.0e9
    tx_power_mw: float = 1.0
    reflection_coeff: float = 0.62
    noise_avg_dbm: float = -93.8
    n_reflectors: int = 1

    def __post_init__(self) -> None:
        if self.frequency_hz <= 0.0:
            raise InvalidConfigError("frequency must be positive")
        if self.tx_power_mw <= 0.0:
            raise InvalidConfigError("transmit power must be positive")
        if not 0.0 <= self.reflection_coeff <= 1.0:
            raise InvalidConfigError("reflection coefficient must be in [0, 1]")
        if self.n_reflectors < 0:
            raise InvalidConfigError("reflector count must be non-negative")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    @property
    def noise_avg_mw(self) -> float:
        return 10.0 ** (self.noise_avg_dbm / 10.0)


@dataclass(frozen=True)
class ChannelSample:
    """One complex received value for one beam at one time."""

    value: complex
    beam_id: str
    t: float = 0.0


@dataclass(frozen=True)
class NoiseModel:
    """Circularly-symmetric complex Gaussian receiver noise.

    Each beam gets an independent substream derived from (seed, beam index);
    sample i of a stream is reproducible on its own or as part of a block.
    """

    avg_power_mw: float
    seed: int = 0

    def _rng(self, beam_index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(beam_index,))
        return np.random.default_rng(ss)

    def block(self, beam_index: int, n: int) -> np.ndarray:
        """Noise samples 0..n-1 of one beam's stream."""
        g = self._rng(beam_index).standard_normal((int(n), 2))
        scale = math.sqrt(self.avg_power_mw / 2.0)
        return scale * (g[:, 0] + 1j * g[:, 1])

    def sample(self, beam_index: int, draw_index: int) -> complex:
        """Single draw, consistent with :meth:`block` at the same index."""
        return complex(self.block(beam_index, draw_index + 1)[-1])


def amplitude_gain(pattern: BeamPattern, theta):
    """Effective amplitude gain sqrt(N_e) * normalized array factor."""
    return math.sqrt(pattern.n_elements) * pattern.gain(theta)


def _path_term(gain_product, gamma: float, d, wavelength: float):
    d = np.asarray(d, dtype=float)
    return gain_product * gamma * (wavelength / (4.0 * np.pi * d)) * np.exp(
        -2j * np.pi * d / wavelength
    )


def los_component(
    geom: LinkGeometry, tx: BeamPattern, rx: BeamPattern, scene: SceneConfig
) -> complex:
    """LOS channel term for one Tx/Rx beam pair.

    The LOS arrives at angle 0 in the link frame; a steered guard pattern
    therefore sees it well off its own boresight.
    """
    g = amplitude_gain(tx, 0.0) * amplitude_gain(rx, 0.0)
    return complex(_path_term(g, 1.0, geom.d_o, scene.wavelength_m))


def _reflection_points(pos, body: BlockerBody | None, n: int) -> np.ndarray:
    center = np.asarray(pos, dtype=float)
    if n <= 1:
        return center[None, :]
    if body is None:
        raise InvalidConfigError("n_reflectors > 1 requires a blocker body (disc radius)")
    angles = 2.0 * np.pi * np.arange(n - 1) / (n - 1)
    rim = center[None, :] + body.radius * np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    return np.concatenate([center[None, :], rim], axis=0)


def nlos_component(
    geom: LinkGeometry,
    pos,
    tx: BeamPattern,
    rx: BeamPattern,
    scene: SceneConfig,
) -> complex:
    """Single-reflection term for a blocker point outside the shadowing area.

    The reflected path length equals the Euclidean Tx->point->Rx distance,
    identical to r/sin(theta_T) + r/sin(theta_R) wherever that form is
    defined.
    """
    if scene.reflection_coeff == 0.0:
        return 0.0 + 0.0j
    bp = blocker_angles(geom, pos)
    if bp.r == 0.0 and not 0.0 < bp.s < geom.d_o:
        raise GeometryDomainError("blocker collinear with the link outside the segment")
    theta_t = math.copysign(bp.theta_t, bp.r) if bp.r != 0.0 else bp.theta_t
    theta_r = math.copysign(bp.theta_r, bp.r) if bp.r != 0.0 else bp.theta_r
    d_n = math.hypot(bp.s, bp.r) + math.hypot(geom.d_o - bp.s, bp.r)
    g = amplitude_gain(tx, theta_t) * amplitude_gain(rx, theta_r)
    return complex(_path_term(g, scene.reflection_coeff, d_n, scene.wavelength_m))


def channel_response(
    geom: LinkGeometry,
    pos,
    tx: BeamPattern,
    rx_patterns: Mapping[str, BeamPattern],
    scene: SceneConfig,
    body: BlockerBody | None = None,
) -> dict[str, complex]:
    """Complex channel per beam: LOS plus reflector sum when a blocker is present.

    pos may be None (no blocker).  A position inside the shadowing area is
    out of model and raises OutOfModelError (requires body).
    """
    out: dict[str, complex] = {}
    points = None
    if pos is not None and scene.n_reflectors > 0:
        if body is not None and in_shadowing_area(geom, pos, body):
            raise OutOfModelError("blocker inside the shadowing area")
        points = _reflection_points(pos, body, scene.n_reflectors)
    for beam_id, rx in rx_patterns.items():
        h = los_component(geom, tx, rx, scene)
        if points is not None:
            for point in points:
                h += nlos_component(geom, point, tx, rx, scene)
        out[beam_id] = h
    return out


def received_sample(
    channel: complex,
    scene: SceneConfig,
    noise: NoiseModel,
    beam_id: str = "main",
    beam_index: int = 0,
    draw_index: int = 0,
    t: float = 0.0,
) -> ChannelSample:
    """sqrt(p_T) * h * pilot + fresh noise draw (unit pilot symbol)."""
    w = noise.sample(beam_index, draw_index)
    value = math.sqrt(scene.tx_power_mw) * channel + w
    return ChannelSample(value=value, beam_id=beam_id, t=t)


def main_beam_baseline(
    geom: LinkGeometry, tx: BeamPattern, rx_main: BeamPattern, scene: SceneConfig
) -> float:
    """Unblocked noiseless main-beam received amplitude sqrt(p_T) * |h_o|."""
    return math.sqrt(scene.tx_power_mw) * abs(los_component(geom, tx, rx_main, scene))


def normalized_level(sample: ChannelSample, baseline: float) -> float:
    """|value| / baseline; the unblocked noiseless main beam normalizes to 1."""
    if not baseline > 0.0:
        raise InvalidCalibrationError("baseline must be positive")
    return abs(sample.value) / baseline


def combined_level(samples: list[ChannelSample]) -> float:
    """Magnitude of the complex sum across beams sharing one time step."""
    if not samples:
        raise InvalidConfigError("combined_level requires at least one beam sample")
    t0 = samples[0].t
    if any(s.t != t0 for s in samples):
        raise InvalidConfigError("combined_level requires samples at the same time")
    return abs(sum(s.value for s in samples))
