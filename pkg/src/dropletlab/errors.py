"""Exception types shared across the package."""


class ConvergenceError(RuntimeError):
    """A numerical procedure did not reach its requested accuracy.

    ``best`` carries the best iterate or partial result when one exists.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class SingularConfigurationError(ValueError):
    """Evaluation requested at a singular point (coincident charges)."""


class OverlapError(ValueError):
    """Droplet balls intersect, so the point-charge reductions do not apply."""
