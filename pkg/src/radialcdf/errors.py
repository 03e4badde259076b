"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class SingularEvaluationError(ArithmeticError):
    """Raised when a plug-in estimator is evaluated exactly at a data point,
    where its value is infinite."""


class IngestionError(ValueError):
    """Raised when a data file cannot be turned into a valid sample."""

    def __init__(self, message, bad_rows=None):
        super().__init__(message)
        self.bad_rows = list(bad_rows or [])
