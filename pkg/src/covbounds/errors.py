"""Exception hierarchy shared by the estimation, bounding and CLI layers."""


class CovBoundsError(Exception):
    """Base class for all package errors."""


class IngestionError(CovBoundsError, ValueError):
    """Malformed input data (ragged rows, non-numeric or non-finite cells)."""


class DomainError(CovBoundsError, ArithmeticError):
    """A numerical precondition does not hold (singular matrix, 0 in a divisor)."""


class BoundVacuousError(DomainError):
    """The perturbation bound is too wide for the requested quantity.

    Raised when the smallest eigenvalue of the covariance estimate does not
    exceed epsilon, so the inverse cannot be bounded at this confidence level.
    """


class GenerationError(CovBoundsError, RuntimeError):
    """Synthetic ground-truth generation gave up after its retry cap."""
