"""Exception types shared across the toolkit."""


class PosteriorLabError(Exception):
    """Base class for all toolkit errors."""


class DegeneratePriorError(PosteriorLabError):
    """All prior weights are zero."""


class ContradictionError(PosteriorLabError):
    """Every likelihood value is zero: the data contradict all model values."""


class FactorizationError(PosteriorLabError):
    """Covariance matrix is not positive-definite.

    ``leading_minor`` is the 1-based order of the first non-positive-definite
    leading principal minor.
    """

    def __init__(self, message: str, leading_minor: int):
        super().__init__(message)
        self.leading_minor = leading_minor


class OptimizationError(PosteriorLabError):
    """Mode search failed to converge; ``best`` carries the best iterate found."""

    def __init__(self, message: str, best):
        super().__init__(message)
        self.best = best


class StencilError(PosteriorLabError):
    """A finite-difference stencil hit a non-finite evaluation."""


class SaddlePointError(PosteriorLabError):
    """Negated Hessian at the mode is not positive-definite.

    ``eigenvalues`` holds the eigenvalues of the negated Hessian.
    """

    def __init__(self, message: str, eigenvalues):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class InfeasibleAssessmentError(PosteriorLabError):
    """No beta shape parameters match the stated quantile assessment."""


class DecompositionUndefinedError(PosteriorLabError):
    """Posterior-mean decomposition requested with no data (n = 0)."""


class DegenerateChainError(PosteriorLabError):
    """Chain draws have zero variance; autocorrelation is undefined."""
