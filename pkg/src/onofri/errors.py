"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit-specific failures."""


class GridConfigError(ToolkitError):
    """Grid cannot represent the requested band limit without aliasing."""


class InvalidFieldError(ToolkitError, ValueError):
    """Field values are non-finite or have the wrong shape."""


class GaugeError(ToolkitError):
    """An operation required the gauge normalisation of exp-mass one."""


class PoleError(ToolkitError, ValueError):
    """Stereographic forward map evaluated at the projection pole."""


class DivergentMassError(ToolkitError):
    """A planar mass integral does not converge (slope at or below 2l+2)."""


class NonConvergenceError(ToolkitError):
    """An iterative solve stalled; carries the best iterate found so far."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual
