"""Exception hierarchy shared across the package."""


class SparseRankError(Exception):
    """Base class for all errors raised by sparserank."""


class NotPrimePower(SparseRankError):
    """q is not a prime power (or q < 2)."""


class Unsupported(SparseRankError):
    """Input exceeds the supported desk-scale range."""


class DivisionByZero(SparseRankError):
    """Multiplicative inverse of zero requested."""


class BadParameter(SparseRankError):
    """A numeric parameter violates its documented precondition."""


class OutOfDomain(SparseRankError):
    """Function argument outside its domain (typically [0, 1])."""


class RetriesExhausted(SparseRankError):
    """Rejection sampling hit its retry cap."""


class TooLarge(SparseRankError):
    """Matrix or enumeration exceeds the hard size cap."""


class LengthMismatch(SparseRankError):
    """Paired sequences have different lengths."""


class NotCoprime(SparseRankError):
    """A coprimality precondition fails."""


class BadInput(SparseRankError):
    """Structurally invalid input (e.g. all-equal coefficients where at least
    two distinct values are required)."""


class BadConfig(SparseRankError):
    """Malformed configuration document."""
