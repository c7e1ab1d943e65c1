"""Exception hierarchy shared by all modules."""


class AveError(Exception):
    """Base class for errors raised by avebcd."""


class ParseError(AveError):
    """A matrix or vector file could not be parsed."""


class DimensionMismatch(AveError):
    """Vector or matrix sizes are inconsistent."""


class NonSymmetric(AveError):
    """The coefficient matrix is not exactly symmetric."""


class ZeroRhs(AveError):
    """The right-hand side is zero, so the relative residual is undefined."""


class DegenerateBlock(AveError):
    """A block subproblem has a vanishing determinant (or a 1-D curvature <= 0)."""


class TooLarge(AveError):
    """The problem is too large for brute-force enumeration."""
