"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class LGOrbError(Exception):
    """Base class for all errors raised by lgorb."""


class DivisionByZero(LGOrbError, ZeroDivisionError):
    pass


class InputTooLarge(LGOrbError):
    pass


class ParseError(LGOrbError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class NoUniqueWeights(LGOrbError):
    pass


class NotInvertible(LGOrbError):
    """Raised both for non-invertible polynomials and singular matrices."""


class DegenerateInput(LGOrbError):
    pass


class OrderCapExceeded(LGOrbError):
    pass


class ElementNotInGroup(LGOrbError):
    pass


class PreconditionViolated(LGOrbError):
    pass


class NotInCentralizer(LGOrbError):
    pass


class NonIntegerMultiplicity(LGOrbError):
    pass


class NonIntegralCoefficient(LGOrbError):
    pass


class TruncationOverflow(LGOrbError):
    pass


class IllDefinedIndex(LGOrbError):
    pass


class NotFermat(LGOrbError):
    pass


class NotDiagonal(LGOrbError):
    pass


class NonPolynomialQuotient(LGOrbError):
    pass


class InvalidDivisor(LGOrbError):
    pass


class IdentityViolation(LGOrbError):
    """A structural identity (symmetry, duality, ...) failed on computed data."""
