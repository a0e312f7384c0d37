"""Exception hierarchy shared by every module of the package."""


class StrichartzError(Exception):
    """Base class for all errors raised by this package."""


class ZeroModeViolation(StrichartzError, ValueError):
    """A negative-order operator was applied to a field with nonzero mean."""


class NonFiniteSymbol(StrichartzError, ValueError):
    """A Fourier symbol evaluated to NaN or infinity at a nonzero frequency."""


class AxisOutOfRange(StrichartzError, IndexError):
    pass


class BadExponent(StrichartzError, ValueError):
    pass


class BadAlpha(StrichartzError, ValueError):
    pass


class DimensionMismatch(StrichartzError, ValueError):
    pass


class NotDivergenceFree(StrichartzError, ValueError):
    pass


class DivisionByZero(StrichartzError, ZeroDivisionError):
    pass


class TimeGridMismatch(StrichartzError, ValueError):
    pass


class ZeroEnergy(StrichartzError, ZeroDivisionError):
    pass


class NotApplicable(StrichartzError, ValueError):
    """An operation's precondition on its input does not hold."""


class MissingField(StrichartzError, ValueError):
    pass


class WrongDimension(StrichartzError, ValueError):
    pass


class Infeasible(StrichartzError, RuntimeError):
    pass


class ExponentCheckFailed(StrichartzError, ValueError):
    """An experiment was configured with exponents that fail their checker."""

    def __init__(self, result):
        self.result = result
        super().__init__(f"exponent tuple rejected: {result}")


class ConfigError(StrichartzError, ValueError):
    pass
