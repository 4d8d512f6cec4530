"""Exception hierarchy shared by the numerical modules."""


class MehlerError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MehlerError, ValueError):
    """An argument lies outside the supported domain of an operation."""


class PoleError(DomainError):
    """Evaluation at a pole (e.g. gamma at a nonpositive integer)."""


class OverflowGuardError(MehlerError, OverflowError):
    """The requested value would overflow the supported parameter box."""


class QuadratureError(MehlerError, ArithmeticError):
    """The integrand produced NaN or the tail search could not terminate."""
