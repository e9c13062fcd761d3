class InputError(ValueError):
    """Raised for malformed scenes, invalid parameters and undefined operators."""
    exit_code = 2


class NotInSpaceError(InputError):
    """The modular of a function diverges for every scaling."""


class NumericError(Exception):
    """Raised when a computed quantity cannot be trusted at the available resolution."""
    exit_code = 3


class ResolutionError(NumericError):
    """The curve sampling is too coarse for the requested geometry query."""
