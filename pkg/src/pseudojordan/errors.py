"""Exception types raised across the package."""


class PseudoJordanError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(PseudoJordanError, ValueError):
    pass


class SingularMatrix(PseudoJordanError):
    pass


class ConvergenceFailure(PseudoJordanError):
    pass


class AmbiguousClustering(PseudoJordanError):
    pass


class NoSaturation(PseudoJordanError):
    pass


class InvalidWeyr(PseudoJordanError, ValueError):
    pass


class ChainConstructionFailure(PseudoJordanError):
    pass


class SignCountMismatch(PseudoJordanError, ValueError):
    pass


class ZeroLeadingCoefficient(PseudoJordanError, ValueError):
    pass


class IndexMismatch(PseudoJordanError, ValueError):
    pass


class NotInModuli(PseudoJordanError, ValueError):
    pass


class InvalidGrid(PseudoJordanError, ValueError):
    pass


class IndexOutOfRange(PseudoJordanError, IndexError):
    pass


class ParseError(PseudoJordanError, ValueError):
    """Malformed matrix document.

    ``location`` names the offending field (``"entries[1]"``) or the
    ``line:column`` position of a JSON syntax error.
    """

    def __init__(self, message, location=None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location
