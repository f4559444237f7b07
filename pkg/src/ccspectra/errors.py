"""Exception hierarchy.

Every error raised by the library derives from :class:`CCError`, and every
error that signals bad caller input also derives from :class:`ValueError`
so plain ``except ValueError`` keeps working.
"""


class CCError(Exception):
    """Base class for all ccspectra errors."""


class ComplexError(CCError, ValueError):
    """Invalid combinatorial complex construction."""


class RankViolation(ComplexError):
    """The rank function is not order-preserving (or a rank-0 cell is not a singleton)."""


class NegativeRank(ComplexError):
    pass


class EmptyCell(ComplexError):
    pass


class FeatureShapeMismatch(ComplexError):
    pass


class SelfLoop(ComplexError):
    pass


class PermutationSizeMismatch(CCError, ValueError):
    pass


class InvalidPermutation(CCError, ValueError):
    pass


class CCSyntaxError(CCError, ValueError):
    """Malformed CC document; ``location`` names the offending line/field."""

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class RankOutOfRange(CCError, ValueError):
    pass


class UnknownScheme(CCError, ValueError):
    pass


class UnknownConvention(CCError, ValueError):
    pass


class WeightLengthMismatch(CCError, ValueError):
    pass


class NotSymmetric(CCError, ValueError):
    pass


class SolverFailure(CCError, RuntimeError):
    pass


class NegativeTime(CCError, ValueError):
    pass


class InvalidTimeGrid(CCError, ValueError):
    pass


class NonPositiveCount(CCError, ValueError):
    pass


class DimensionMismatch(CCError, ValueError):
    pass


class GridTooSmall(CCError, ValueError):
    pass


class InvalidFaceIndex(CCError, ValueError):
    pass


class UnknownMode(CCError, ValueError):
    pass


class TooLarge(CCError, ValueError):
    pass
