"""Exception hierarchy shared by every module of the package."""


class HardyBoundError(Exception):
    """Base class for all package errors."""


class ArgumentError(HardyBoundError, ValueError):
    """An argument is outside the range an operation accepts."""


class DomainError(HardyBoundError, ValueError):
    """A curve was evaluated (or combined) outside of its domain."""

    def __init__(self, message, domain=None):
        super().__init__(message)
        self.domain = domain


class CapabilityError(HardyBoundError):
    """The requested quantity is divergent or not representable."""


class PreconditionError(HardyBoundError):
    """A checked hypothesis of a bound does not hold.

    ``witness`` carries the offending data (e.g. a grid triple).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
