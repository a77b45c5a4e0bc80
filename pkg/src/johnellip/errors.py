"""Exception types shared across the package."""


class JohnEllipsoidError(Exception):
    """Base class for every error this package raises deliberately."""


class DimensionError(JohnEllipsoidError):
    """Constraint matrix shape is unusable (m < n, empty, or not 2-D)."""


class ZeroRowError(JohnEllipsoidError):
    """A constraint row is identically zero, so the polytope is degenerate."""

    def __init__(self, row: int):
        super().__init__(f"constraint row {row} is identically zero")
        self.row = row


class RankDeficientError(JohnEllipsoidError):
    """Constraint matrix does not have full column rank."""


class NotPositiveDefiniteError(JohnEllipsoidError):
    """Weighted Gram matrix is numerically semidefinite or indefinite."""


class DomainError(JohnEllipsoidError, ValueError):
    """A scalar or vector argument lies outside its documented range."""


class NoConvergenceError(JohnEllipsoidError):
    """Reference solver exhausted its iteration budget before reaching tol."""

    def __init__(self, iterations: int, max_sigma: float | None = None):
        detail = f"no convergence after {iterations} iterations"
        if max_sigma is not None:
            detail += f" (max score {max_sigma!r})"
        super().__init__(detail)
        self.iterations = iterations
        self.max_sigma = max_sigma


class ParseError(JohnEllipsoidError):
    """Matrix Market input is malformed or uses an unsupported variant."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GenerationFailedError(JohnEllipsoidError):
    """Random generation kept producing invalid matrices and gave up."""
