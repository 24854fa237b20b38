"""2-D link geometry: blocker coordinates, reflected path lengths, shadowing tests.

The link frame has the Tx at the origin and the Rx on the positive x axis.
The perpendicular offset r is signed: positive r is the side the guard beam
steers toward.  All functions are pure and accept scalars or numpy arrays
where noted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryDomainError, InvalidGeometryError

Point = tuple[float, float]


@dataclass(frozen=True)
class LinkGeometry:
    """Fixed Tx/Rx placement of one mmWave link."""

    tx_position: Point
    rx_position: Point

    def __post_init__(self) -> None:
        if self.d_o <= 0.0:
            raise InvalidGeometryError("Tx and Rx positions coincide")

    @property
    def d_o(self) -> float:
        """Line-of-sight distance between Tx and Rx in meters."""
        dx = self.rx_position[0] - self.tx_position[0]
        dy = self.rx_position[1] - self.tx_position[1]
        return math.hypot(dx, dy)

    @property
    def _axis(self) -> tuple[float, float]:
        d = self.d_o
        return (
            (self.rx_position[0] - self.tx_position[0]) / d,
            (self.rx_position[1] - self.tx_position[1]) / d,
        )

    def to_local(self, pos) -> tuple[np.ndarray, np.ndarray]:
        """World point(s) -> (s, r): along-link distance from Tx, signed offset.

        Positive r lies on the left of the Tx->Rx direction (the guard side).
        Accepts a single (x, y) pair or an (N, 2) array.
        """
        ux, uy = self._axis
        p = np.asarray(pos, dtype=float)
        dx = p[..., 0] - self.tx_position[0]
        dy = p[..., 1] - self.tx_position[1]
        s = dx * ux + dy * uy
        r = -dx * uy + dy * ux
        return s, r

    def from_local(self, s, r) -> np.ndarray:
        """Inverse of :meth:`to_local`."""
        ux, uy = self._axis
        s = np.asarray(s, dtype=float)
        r = np.asarray(r, dtype=float)
        x = self.tx_position[0] + s * ux - r * uy
        y = self.tx_position[1] + s * uy + r * ux
        return np.stack([x, y], axis=-1)


@dataclass(frozen=True)
class BlockerPosition:
    """Link-local blocker coordinates with both azimuth angles.

    r is signed (positive on the guard side); theta_t / theta_r are the
    unsigned azimuth angles at the Tx and Rx between the LOS direction and
    the blocker, in radians.
    """

    r: float
    s: float
    theta_t: float
    theta_r: float


@dataclass(frozen=True)
class BlockerBody:
    """Moving blocker disc on a straight constant-speed trajectory."""

    radius: float
    speed: float
    start: Point
    direction: Point

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise InvalidGeometryError("blocker radius must be positive")
        if self.speed <= 0.0:
            raise InvalidGeometryError("blocker speed must be positive")
        norm = math.hypot(*self.direction)
        if norm == 0.0:
            raise InvalidGeometryError("blocker direction must be non-zero")
        object.__setattr__(self, "direction", (self.direction[0] / norm, self.direction[1] / norm))

    def position(self, t):
        """Disc center at time(s) t in seconds; vectorized over t."""
        t = np.asarray(t, dtype=float)
        x = self.start[0] + t * self.speed * self.direction[0]
        y = self.start[1] + t * self.speed * self.direction[1]
        return np.stack([x, y], axis=-1)


def blocker_angles(geom: LinkGeometry, pos) -> BlockerPosition:
    """Link-local coordinates (r, s) and azimuth angles of a blocker point.

    The sign of r encodes the side of the link.  Raises
    InvalidGeometryError if pos coincides with an endpoint.
    """
    s, r = geom.to_local(pos)
    s = float(s)
    r = float(r)
    if math.hypot(s, r) < 1e-15 or math.hypot(s - geom.d_o, r) < 1e-15:
        raise InvalidGeometryError("blocker coincides with a link endpoint")
    theta_t = math.atan2(abs(r), s)
    theta_r = math.atan2(abs(r), geom.d_o - s)
    return BlockerPosition(r=r, s=s, theta_t=theta_t, theta_r=theta_r)


def nlos_path_length(r: float, theta_t: float, theta_r: float) -> float:
    """Total reflected path length r/sin(theta_t) + r/sin(theta_r) in meters.

    r is the unsigned perpendicular offset.  r = 0 returns 0.  A zero sine
    with r > 0 means the blocker is collinear with an endpoint and the
    length is undefined.
    """
    r = abs(r)
    if r == 0.0:
        return 0.0
    st, sr = math.sin(theta_t), math.sin(theta_r)
    if st <= 0.0 or sr <= 0.0:
        raise GeometryDomainError("blocker collinear with a link endpoint")
    return r / st + r / sr


def segment_distance(geom: LinkGeometry, pos):
    """Distance from point(s) to the closed Tx-Rx segment; vectorized."""
    s, r = geom.to_local(pos)
    s_clamped = np.clip(s, 0.0, geom.d_o)
    return np.hypot(s - s_clamped, r)


def in_shadowing_area(geom: LinkGeometry, pos, body: BlockerBody) -> bool:
    """True iff the blocker disc touches the Tx-Rx segment (closed boundary)."""
    return bool(segment_distance(geom, pos) <= body.radius)


def shadowing_time(
    geom: LinkGeometry, body: BlockerBody, dt: float, t_max: float = 60.0
) -> float | None:
    """First sampled time (a multiple of dt) at which the disc shadows the link.

    Scans the trajectory on the dt grid up to t_max seconds; returns None if
    the LOS is never obstructed within the horizon.
    """
    if dt <= 0.0:
        raise InvalidGeometryError("dt must be positive")
    t = np.arange(0.0, t_max + dt / 2, dt)
    dist = segment_distance(geom, body.position(t))
    hits = np.nonzero(dist <= body.radius)[0]
    if hits.size == 0:
        return None
    return float(t[hits[0]])
