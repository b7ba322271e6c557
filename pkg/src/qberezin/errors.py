"""Exception types raised across the package."""


class QBerezinError(Exception):
    pass


class DomainError(QBerezinError, ValueError):
    """An argument lies outside the domain of the operation (e.g. |w| >= 1)."""


class BranchMismatchError(QBerezinError, ValueError):
    pass


class ConsistencyError(QBerezinError, ArithmeticError):
    """A numerical invariant (residual, realness) failed its tolerance."""


class NoSolutionError(QBerezinError, ValueError):
    pass


class TruncationError(QBerezinError, ArithmeticError):
    """The series oracle would need more terms than the configured cap."""


class LengthOverflowError(QBerezinError, ArithmeticError):
    pass


class UnsupportedFormError(QBerezinError, ValueError):
    pass


class DegenerateCloudError(QBerezinError, ValueError):
    pass


class EvaluationError(QBerezinError):
    """Evaluation failed at an identified grid point."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
