"""Exception types raised across the package."""


class NMDistillError(Exception):
    """Base class for all package errors."""


class ShapeMismatch(NMDistillError, ValueError):
    pass


class DimensionMismatch(NMDistillError, ValueError):
    pass


class NotHermitian(NMDistillError, ValueError):
    pass


class NotTracePreserving(NMDistillError, ValueError):
    pass


class ResourceLimit(NMDistillError, ValueError):
    pass


class SingularDynamics(NMDistillError, ArithmeticError):
    """The earlier map in a divisibility problem cannot be inverted."""


class ConfigError(NMDistillError, ValueError):
    pass
