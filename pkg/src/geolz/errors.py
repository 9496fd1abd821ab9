"""Exception hierarchy shared by every geolz module."""

from __future__ import annotations


class GeolzError(Exception):
    """Base class for all errors raised by geolz."""


# --- qubit model -----------------------------------------------------------

class QubitModelError(GeolzError, ValueError):
    """Base class for phase-qubit potential errors."""


class NoRootInBracket(QubitModelError):
    """The stationarity condition has no sign change in the search bracket."""


class DegenerateWell(QubitModelError):
    """A stationary point has (nearly) vanishing curvature."""


class ImaginaryFrequency(QubitModelError):
    """The small-oscillation radicand is not positive."""


class TargetOutOfRange(QubitModelError):
    """A calibration target is not bracketed by the search interval."""


class NotMonotonic(QubitModelError):
    """The level spacing is not monotonic over the search interval."""


class BiasPointError(QubitModelError):
    """A well error raised at a specific flux bias during a scan.

    Attributes
    ----------
    bias : float
        The offending external flux, in radians.
    cause : QubitModelError
        The underlying error.
    """

    def __init__(self, bias: float, cause: Exception):
        self.bias = bias
        self.cause = cause
        super().__init__(f"at phi_ex={bias!r}: {type(cause).__name__}: {cause}")


# --- schedule --------------------------------------------------------------

class ScheduleError(GeolzError, ValueError):
    """Base class for schedule construction and DSL errors.

    Attributes
    ----------
    line, column : int or None
        1-based location in DSL text when the error came from the parser.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        self.message = message
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class ScheduleSyntaxError(ScheduleError):
    """Malformed DSL text."""


class UnknownKey(ScheduleError):
    """A DSL statement used a key that the statement does not accept."""


class UnitError(ScheduleError):
    """A quantity had a missing, unknown or mismatched unit suffix."""


class NegativeDuration(ScheduleError):
    """A segment duration is not strictly positive."""


class InvalidTiming(ScheduleError):
    """Protocol timings are inconsistent (for example a too-short cycle)."""


class OutOfRange(ScheduleError):
    """A sample time lies outside the schedule."""


# --- dynamics --------------------------------------------------------------

class DynamicsError(GeolzError, ArithmeticError):
    """Base class for integrator failures."""


class StepTooLarge(DynamicsError, ValueError):
    """The requested step exceeds the shortest segment."""


class NormDrift(DynamicsError):
    """A pure state lost normalization beyond tolerance."""


class PositivityLoss(DynamicsError):
    """A density matrix acquired a significantly negative eigenvalue."""


# --- analytic / experiments ------------------------------------------------

class EmptySeries(GeolzError, ValueError):
    """A reduction was asked of an empty series."""


class PlateauNotFlat(GeolzError):
    """The post-crossing plateau fluctuates more than the allowed threshold."""


class FitError(GeolzError, ArithmeticError):
    """Base class for exponential fit failures."""


class SingularFit(FitError):
    """The data do not constrain all fit parameters."""


class NoConvergence(FitError):
    """The fit did not converge within the iteration cap."""


class SweepPointError(GeolzError):
    """A runner failed at one sweep point.

    Attributes
    ----------
    point : dict
        Sweep coordinates of the failing point.
    cause : Exception
        The underlying error.
    """

    def __init__(self, point: dict, cause: Exception):
        self.point = point
        self.cause = cause
        coords = ", ".join(f"{k}={v!r}" for k, v in point.items())
        super().__init__(f"at {coords}: {type(cause).__name__}: {cause}")


# --- cli -------------------------------------------------------------------

class UsageError(GeolzError, ValueError):
    """Bad command-line usage."""


class IoError(GeolzError, OSError):
    """Output could not be written."""
