"""Uniform-linear-array beam synthesis for (HPBW, steering angle) requests.

A pattern is the normalized array-factor magnitude of an N-element ULA with
half-wavelength spacing; steering is applied in sine space (phase-shift
steering), so a steered beam broadens slightly off broadside.  Side lobes
are kept: no taper is applied.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, InvalidConfigError

MAX_ELEMENTS = 512

_ROLES = ("tx", "rx_main", "rx_guard")


@dataclass(frozen=True)
class BeamSpec:
    """Requested beam: half-power beamwidth and boresight offset from the LOS."""

    hpbw_deg: float
    steering_deg: float = 0.0
    role: str = "rx_main"

    def __post_init__(self) -> None:
        if not 0.0 < self.hpbw_deg < 180.0:
            raise InvalidConfigError(f"hpbw_deg must be in (0, 180), got {self.hpbw_deg}")
        if self.role not in _ROLES:
            raise InvalidConfigError(f"unknown beam role {self.role!r}")
        if self.role in ("tx", "rx_main") and self.steering_deg != 0.0:
            raise InvalidConfigError(f"{self.role} beams must be boresight-aligned to the LOS")


def array_factor(theta, n_elements: int, spacing: float = 0.5, steering_rad: float = 0.0):
    """Normalized ULA array-factor magnitude at angle(s) theta (radians).

    |sin(N psi/2) / (N sin(psi/2))| with psi = 2 pi spacing (sin theta - sin steering).
    The removable singularity at psi = 0 evaluates to 1.
    """
    theta = np.asarray(theta, dtype=float)
    psi = 2.0 * np.pi * spacing * (np.sin(theta) - math.sin(steering_rad))
    half = psi / 2.0
    den = n_elements * np.sin(half)
    num = np.sin(n_elements * half)
    ok = np.abs(den) > 1e-12
    return np.abs(np.where(ok, np.divide(num, den, out=np.ones_like(psi), where=ok), 1.0))


@functools.lru_cache(maxsize=None)
def measure_hpbw_deg(n_elements: int, spacing: float = 0.5) -> float:
    """Half-power beamwidth of the broadside power pattern, by bisection.

    Returns 360.0 when the power pattern never drops below one half
    (isotropic single element).
    """
    if n_elements < 1:
        raise InvalidConfigError("n_elements must be >= 1")
    if n_elements == 1:
        return 360.0

    def power(theta: float) -> float:
        return float(array_factor(theta, n_elements, spacing)) ** 2

    # Bracket the -3 dB point with a coarse scan, then bisect.
    hi = None
    step = math.radians(0.05)
    theta = step
    while theta <= math.pi / 2:
        if power(theta) < 0.5:
            hi = theta
            break
        theta += step
    if hi is None:
        return 360.0
    lo = hi - step
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if power(mid) >= 0.5:
            lo = mid
        else:
            hi = mid
    return math.degrees(lo + hi)  # 2 * midpoint


def elements_for_hpbw(hpbw_deg: float, spacing: float = 0.5) -> int:
    """Smallest element count whose broadside HPBW does not exceed the request."""
    if not 0.0 < hpbw_deg < 180.0:
        raise InvalidConfigError(f"hpbw_deg must be in (0, 180), got {hpbw_deg}")
    lo, hi = 2, MAX_ELEMENTS
    if measure_hpbw_deg(lo, spacing) <= hpbw_deg:
        return lo
    if measure_hpbw_deg(hi, spacing) > hpbw_deg:
        raise CapabilityError(f"HPBW {hpbw_deg} deg unattainable with <= {MAX_ELEMENTS} elements")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if measure_hpbw_deg(mid, spacing) <= hpbw_deg:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class BeamPattern:
    """Synthesized ULA pattern: unit peak amplitude at the steering angle."""

    n_elements: int
    spacing: float = 0.5
    steering_rad: float = 0.0
    hpbw_requested_deg: float | None = None

    def gain(self, theta):
        """Normalized amplitude gain in [0, 1] at angle(s) theta from the LOS."""
        return array_factor(theta, self.n_elements, self.spacing, self.steering_rad)

    @property
    def hpbw_measured_deg(self) -> float:
        """Broadside HPBW of the synthesized element count."""
        return measure_hpbw_deg(self.n_elements, self.spacing)

    @property
    def hpbw_residual_deg(self) -> float:
        """Requested minus measured HPBW (integer element counts only)."""
        if self.hpbw_requested_deg is None:
            return 0.0
        return self.hpbw_requested_deg - self.hpbw_measured_deg


ISOTROPIC = BeamPattern(n_elements=1)


def synthesize(spec: BeamSpec, spacing: float = 0.5) -> BeamPattern:
    """Build the pattern for a beam spec; steering is converted to radians."""
    n = elements_for_hpbw(spec.hpbw_deg, spacing)
    return BeamPattern(
        n_elements=n,
        spacing=spacing,
        steering_rad=math.radians(spec.steering_deg),
        hpbw_requested_deg=spec.hpbw_deg,
    )
