"""Exception types shared across the library."""


class EigshapeError(Exception):
    """Base class for all library errors."""


class DegenerateShape(EigshapeError):
    """Triangle parameters outside the admissible region (r > 0, 0 < theta < pi)."""


class DimensionMismatch(EigshapeError):
    """Coefficient vectors or matrices of incompatible sizes."""


class ConvergenceFailure(EigshapeError):
    """Eigenvalue solver did not reach the requested residual tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class DivisionByZeroInterval(EigshapeError):
    """Interval division by a divisor enclosing zero."""


class NegativeSqrt(EigshapeError):
    """Square root of an interval entirely below zero."""


class SingularEnclosure(EigshapeError):
    """Interval matrix whose determinant enclosure contains zero."""


class GapTooSmall(EigshapeError):
    """Cluster is not verifiably separated; bound formula not applicable."""


class InvalidDeltaB(EigshapeError):
    """A distance bound exceeds the domain of the requested formula."""


class DeltaTooLarge(EigshapeError):
    """Subspace distance too large for the orthonormal-correction formula (needs < 1/2)."""


class LinearDependence(EigshapeError):
    """Linear independence of the comparison system could not be verified."""


class NotCertifiedSimple(EigshapeError):
    """Eigenvalue is not certified simple; the scalar derivative formula does not apply."""
