"""Exception hierarchy.

Validation errors (bad input shape, wrong frame, non-unitary matrix...) derive
from :class:`ValidationError`; failures of a numerical procedure on valid input
derive from :class:`NumericalError`. The CLI maps them to exit codes 2 and 3.
"""


class KDError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(KDError, ValueError):
    pass


class NumericalError(KDError, ArithmeticError):
    pass


class NotSquare(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotUnitary(ValidationError):
    pass


class DimMismatch(ValidationError):
    pass


class ZeroOverlap(ValidationError):
    """The transition matrix has (numerically) vanishing entries."""


class DependentColumns(ValidationError):
    pass


class WrongDimension(ValidationError):
    pass


class NotReal(ValidationError):
    pass


class NotInSpan(ValidationError):
    pass


class NotInHull(ValidationError):
    pass


class NotKDPositive(ValidationError):
    pass


class NotDensityMatrix(ValidationError):
    pass


class NotDFT(ValidationError):
    pass


class NotPrime(ValidationError):
    pass


class NotMUB(ValidationError):
    pass


class WrongMatrix(ValidationError):
    pass


class DegenerateSolution(NumericalError):
    pass
