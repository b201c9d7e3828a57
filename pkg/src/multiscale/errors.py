"""Exception hierarchy shared across the package."""


class MultiScaleError(Exception):
    """Base class for all package errors."""


class ConfigurationError(MultiScaleError, ValueError):
    """Invalid construction arguments (priors, scales, kernels, decision sets)."""


class DimensionError(MultiScaleError, ValueError):
    """Vector or matrix shapes do not agree."""


class ScaleViolation(MultiScaleError, ValueError):
    """A loss entry exceeds its declared range.

    ``index`` names the offending expert (or handle).
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SizingError(MultiScaleError, OverflowError):
    """A bound or range computation would overflow double precision."""


class SolverError(MultiScaleError, RuntimeError):
    """The saddle-point solver could not certify the requested accuracy.

    Carries the best iterate found and its certified optimality gap.
    """

    def __init__(self, message, p=None, gap=None):
        super().__init__(message)
        self.p = p
        self.gap = gap
