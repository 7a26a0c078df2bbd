"""Exception types shared across the package."""


class GraymetError(Exception):
    """Base class for all graymet errors."""


class SingularDenominatorError(GraymetError):
    """A coefficient formula was evaluated at a zero of its denominator."""


class ParameterRangeError(GraymetError):
    """A family parameter lies outside its admissible range."""


class PositivityError(GraymetError):
    """A polynomial that must be positive on an interval is not."""


class DivergenceError(GraymetError):
    """An arc-length integral diverges (boundary root is not simple)."""


class InversionError(GraymetError):
    """Monotone inversion of the arc-length map failed."""


class ProfileDomainError(GraymetError):
    """Evaluation outside the domain of a profile, chart, or rational form."""


class CalibrationError(GraymetError):
    """The finite-difference oracle failed a known-answer calibration case."""
