"""Exception hierarchy.

Input problems (bad shapes, invalid parameters, malformed files) derive from
``ValueError``; numerical failures derive from ``NumericError``.  The CLI maps
the first family to exit code 2 and the second to exit code 3.
"""


class QSysError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(QSysError, ValueError):
    pass


class InvalidParameterError(QSysError, ValueError):
    pass


class FileFormatError(QSysError, ValueError):
    pass


class NumericError(QSysError, ArithmeticError):
    pass


class SingularOperatorError(NumericError):
    """Raised when a linear operator that must be inverted is (numerically) singular."""

    def __init__(self, message, smallest_singular_value):
        super().__init__(f"{message} (smallest singular value {smallest_singular_value:.3e})")
        self.smallest_singular_value = smallest_singular_value


class ReductionUndefinedError(SingularOperatorError):
    pass


class EliminationUndefinedError(SingularOperatorError):
    pass


class InconsistentWitnessError(NumericError):
    pass


class PoleProximityError(NumericError):
    def __init__(self, omega, smallest_singular_value):
        super().__init__(
            f"frequency omega={omega!r} lies on an imaginary-axis pole "
            f"(smallest singular value of i*omega*I - F is {smallest_singular_value:.3e})"
        )
        self.omega = omega
        self.smallest_singular_value = smallest_singular_value
