"""Exception hierarchy shared by the library and the command-line front end."""


class TruncDimError(Exception):
    """Base class for every error raised by :mod:`truncdim`."""


class InvalidParameterError(TruncDimError, ValueError):
    """An argument lies outside the admissible domain (exponent, index, point)."""


class ModeMismatchError(InvalidParameterError):
    """The operation does not apply to this exponent configuration (e.g. p = 1)."""


class AdmissibilityError(InvalidParameterError):
    """POD weights violate ``a > max(1/p*, b)``."""


class UnsupportedModelError(TruncDimError):
    """The weight model has no closed form here and is too large to enumerate."""


class DivergenceError(TruncDimError, ArithmeticError):
    """A defining series or product is infinite."""


class NoSolutionError(TruncDimError):
    """No truncation level meets the requested threshold."""


class EnumerationLimitError(TruncDimError):
    """Subset enumeration was requested beyond the supported dimension cap."""
