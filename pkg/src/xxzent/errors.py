"""Exception hierarchy shared by all modules."""


class XXZError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(XXZError, ValueError):
    """Malformed input: bad shapes, labels, weights or parameters."""


class CapacityError(XXZError):
    """Requested system is larger than the dense engine supports."""


class DomainError(XXZError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnsupportedCaseError(XXZError):
    """No closed form is tabulated for the requested case."""


class ScanRangeError(XXZError):
    """Temperature scan did not bracket the sought crossing."""
