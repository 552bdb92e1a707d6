"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class AccuracyError(RuntimeError):
    """A numerical routine could not meet its accuracy target.

    Carries the best available estimate and the error bound that was
    actually achieved.
    """

    def __init__(self, message: str, estimate: float = float("nan"),
                 error: float = float("nan")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SpaceMismatchError(TypeError):
    """Points or geodesics from different spaces were mixed."""


class ExpressionError(DomainError):
    """A textual formula could not be parsed."""
