"""Exception hierarchy shared by all guardbeam modules."""


class GuardBeamError(Exception):
    """Base class for all guardbeam errors."""


class InvalidGeometryError(GuardBeamError):
    """Degenerate link geometry (zero-length link, blocker on an endpoint)."""


class GeometryDomainError(GuardBeamError):
    """Geometric quantity undefined for the given inputs (e.g. collinear blocker)."""


class CapabilityError(GuardBeamError):
    """Requested beam shape cannot be synthesized within the element budget."""


class OutOfModelError(GuardBeamError):
    """Blocker inside the shadowing area; the shadowing-period channel is not modeled."""


class InvalidCalibrationError(GuardBeamError):
    """Normalization baseline is not a positive number."""


class CalibrationError(GuardBeamError):
    """Not enough quiescent data to calibrate a detection threshold."""


class InsufficientDataError(GuardBeamError):
    """Level trace shorter than one detection window."""


class InvalidConfigError(GuardBeamError):
    """Malformed or inconsistent configuration."""


class InvalidScenarioError(GuardBeamError):
    """Scenario violates a precondition (e.g. trajectory starts inside the shadowing area)."""


class TraceFormatError(GuardBeamError):
    """Trace file violates the rectangular CSV trace contract."""
