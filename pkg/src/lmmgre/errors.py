"""Exception hierarchy shared across the package."""


class LMMError(Exception):
    """Base class for all errors raised by lmmgre."""


class UnsupportedMethodError(LMMError, ValueError):
    pass


class UnknownProblemError(LMMError, ValueError):
    pass


class DimensionError(LMMError, ValueError):
    pass


class NumericalError(LMMError):
    """Base class for failures of a numerical procedure (CLI exit status 2)."""


class NewtonConvergenceError(NumericalError):
    def __init__(self, message, step=None, residual=None):
        super().__init__(message)
        self.step = step
        self.residual = residual


class SingularJacobianError(NumericalError):
    pass


class DivergenceError(NumericalError):
    pass


class GridMismatchError(LMMError, ValueError):
    pass


class DegenerateParameterError(LMMError, ValueError):
    """Raised when alpha_k - mu*beta_k vanishes and the pencil loses degree."""
