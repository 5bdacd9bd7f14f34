"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An operator failed a required invariant.

    ``violation`` holds the magnitude by which the invariant was missed.
    """

    def __init__(self, message: str, violation: float = float("nan")):
        super().__init__(message)
        self.violation = violation


class NotHermitianError(ValidationError):
    pass


class NotUnitTraceError(ValidationError):
    pass


class NotPositiveError(ValidationError):
    pass


class DimensionMismatchError(ValueError):
    pass


class EpsilonOutOfRangeError(ValueError):
    pass


class InfeasibleWitnessError(ValueError):
    """Raised when an operator does not satisfy the PPT-channel constraints."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NonConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap.  ``result`` holds the best iterate."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result
