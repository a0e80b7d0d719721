"""Exception hierarchy shared across the library."""


class PlanarLearnError(Exception):
    """Base class for all library errors."""


class NotPlanarError(PlanarLearnError):
    """Raised when an operation requires a planar graph and the input is not."""


class NonZeroFieldError(PlanarLearnError):
    """Raised when a zero-field-only routine receives a model with fields.

    Use the auxiliary-node extension (``learn.extend_model``) to reduce a
    non-zero-field model to an equivalent zero-field one first.
    """


class NumericalConsistencyError(PlanarLearnError):
    """Raised when an internal numerical self-check fails.

    Examples: a determinant that should be real positive has a large
    imaginary residue, or a matrix that must be invertible is singular.
    Indicates a broken embedding or matrix construction, not bad data.
    """


class InfeasibleMarginalError(PlanarLearnError):
    """Raised when a moment triple does not define a valid 2x2 marginal."""


class EnumerationSizeError(PlanarLearnError):
    """Raised when a brute-force enumeration request exceeds the size cap."""


class AbsoluteContinuityError(PlanarLearnError):
    """Raised when KL(p, q) is requested but q vanishes on the support of p."""


class FitError(PlanarLearnError):
    """Raised when maximum-likelihood fitting cannot proceed."""


class LearnError(PlanarLearnError):
    """Raised when greedy structure learning aborts.

    Carries the partial trace accumulated before the failure.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class DataError(PlanarLearnError):
    """Raised on malformed input files or inconsistent user data."""
