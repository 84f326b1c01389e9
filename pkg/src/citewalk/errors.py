"""Exception types shared across the package."""


class CitewalkError(Exception):
    """Base class for errors raised by this package."""


class DataError(CitewalkError):
    """Input data is missing, malformed, or internally inconsistent."""


class NumericError(CitewalkError):
    """A numeric routine failed to produce a usable result."""


class ConvergenceError(NumericError):
    """An iteration budget was exhausted before reaching tolerance.

    The last iterate is attached so callers can inspect how far the
    computation got.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate
