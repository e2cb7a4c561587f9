"""Exception types shared across the package.

Everything raised on purpose derives from DyncoolError so callers can catch
one base class at the CLI boundary.
"""

__all__ = [
    "DyncoolError",
    "ValidationError",
    "RangeError",
    "CertificationError",
    "MarginError",
    "SynthesisError",
    "NumericError",
    "ResolutionError",
    "ResourceError",
]


class DyncoolError(Exception):
    """Base class for all package errors."""


class ValidationError(DyncoolError, ValueError):
    """An input violates a structural precondition (shape, hermiticity, norm)."""


class RangeError(DyncoolError, ValueError):
    """A spectrum or parameter falls outside the admissible range."""


class CertificationError(DyncoolError):
    """A grid certification of a polynomial bound failed."""


class MarginError(DyncoolError):
    """A polynomial is too close to the unit circle for completion."""


class SynthesisError(DyncoolError):
    """Angle synthesis could not reduce the polynomial degree."""


class NumericError(DyncoolError):
    """A numerical identity that should hold to tolerance did not."""


class ResolutionError(DyncoolError):
    """A quadrature grid is too coarse for the requested bound check."""


class ResourceError(DyncoolError):
    """A requested object exceeds the configured memory budget."""
