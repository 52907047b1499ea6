"""Exception types raised by kmspectral."""


class KmError(Exception):
    """Base class for all package errors."""


class NonRealFieldError(KmError, ValueError):
    """Inverse transform of a spectrum that does not describe a real field."""


class GridMismatchError(KmError, ValueError):
    """Fields or trajectories defined on different grids were combined."""


class MissingParameterError(KmError, ValueError):
    """A dimensional model parameter required by the operation is absent."""


class EmptyTrajectoryError(KmError, ValueError):
    pass


class ConvergenceError(KmError, RuntimeError):
    """Picard iteration hit ``max_iter`` without meeting the tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class DivergenceError(ConvergenceError):
    """Picard iterate left the ball of radius ``10 * rho``."""


class ReactionOverflowError(KmError, FloatingPointError):
    """Splitting integrator produced a field magnitude above the overflow guard."""


class QuadratureError(KmError, RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget."""


class ConfigError(KmError, ValueError):
    """Invalid run configuration; the message names the offending key."""
