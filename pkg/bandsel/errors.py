"""
Exception types for bandsel.

The CLI maps these onto exit codes: validation problems exit with 3,
every other bandsel failure with 1 (click keeps 2 for usage errors).
"""


class BandselError(Exception):
    """Base class for all bandsel failures."""

    exit_code = 1
    kind = "runtime"


class ValidationError(BandselError, ValueError):
    """A user-supplied value violates a documented precondition."""

    exit_code = 3
    kind = "validation"


class DegenerateSetupError(BandselError):
    """The requested quantity is undefined for this setup (e.g. a flat trend)."""

    kind = "degenerate"


class MomentNotFiniteError(BandselError):
    """A moment of the noise law does not exist for the given parameters."""

    kind = "moment"


class QuadratureError(BandselError):
    """Numerical integration met non-finite integrand values."""

    kind = "quadrature"


class ReplicateError(BandselError):
    """A Monte Carlo replicate failed."""

    kind = "replicate"

    def __init__(self, alpha: float, index: int, cause: Exception):
        self.alpha = alpha
        self.index = index
        self.cause = cause
        super().__init__(f"replicate failed (alpha={alpha:g}, index={index}): {cause}")

    def __reduce__(self):
        return type(self), (self.alpha, self.index, self.cause)
