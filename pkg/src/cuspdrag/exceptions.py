"""Exception and warning types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class DegenerateInputError(ValueError):
    """Not enough usable data to compute the requested quantity."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature stopped before reaching the requested tolerance."""

    def __init__(self, message, estimate=None, value=None):
        super().__init__(message)
        self.estimate = estimate
        self.value = value


class CrossCheckError(RuntimeError):
    """Two independent evaluations of the same quantity disagree."""

    def __init__(self, message, first=None, second=None):
        super().__init__(message)
        self.first = first
        self.second = second


class StepUnderflowError(RuntimeError):
    """The ODE step size fell below its floor before a terminal event."""


class NonFiniteWarning(RuntimeWarning):
    """A quantity was evaluated on the cusp line where it is not finite."""
