"""Exception hierarchy shared by every orbitbench module."""


class OrbitbenchError(Exception):
    """Base class for all engine errors."""


class InvalidParameterError(OrbitbenchError, ValueError):
    """A numeric or structural parameter violates its documented contract."""


class InvalidRotationError(OrbitbenchError, ValueError):
    """A rotation input is degenerate or not orthonormal within tolerance."""


class OutOfBoundsError(OrbitbenchError, ValueError):
    """A spatial query lies outside the queried field's extent."""


class InvalidActionError(OrbitbenchError, ValueError):
    """An action batch has the wrong shape, dtype, or non-finite entries."""


class NotRegisteredError(OrbitbenchError, KeyError):
    """An identifier was not found in the component registry."""


class IncompatibleConfigError(OrbitbenchError, ValueError):
    """A (task, robot, action model) combination is not registered as valid."""


class TransportDeadlineError(OrbitbenchError, TimeoutError):
    """A hardware-interface transport missed its response deadline."""
