"""Exception hierarchy shared by every module."""


class HelixError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(HelixError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ConfigurationError(HelixError, ValueError):
    """Bad numerical configuration (step sizes, modes, grid shapes)."""


class UsageError(HelixError, ValueError):
    """Operands that cannot be combined, e.g. vectors at different base points."""


class DegenerateNormalError(HelixError, ArithmeticError):
    """The tangent plane is null or the parametrization has rank < 2."""
