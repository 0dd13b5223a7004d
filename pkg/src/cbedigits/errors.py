"""Exception and warning types raised across the package."""


class CbeError(Exception):
    """Base class for all package errors."""


class DomainError(CbeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """The gamma function was evaluated at a nonpositive integer."""


class CapacityError(CbeError):
    """An enumeration or sampler would exceed its hard size limit."""


class CoverageError(CbeError):
    """A density grid does not cover enough probability mass."""


class TailError(CbeError):
    """The certified Fourier truncation error exceeds its tolerance."""


class TruncationWarning(UserWarning):
    """A truncated product or series has an estimated error above tolerance."""
