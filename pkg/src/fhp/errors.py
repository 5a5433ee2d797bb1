"""Exception hierarchy shared by every module."""


class FHPError(Exception):
    """Base class for all toolkit errors."""


class InputError(FHPError, ValueError):
    """Malformed or out-of-contract input."""


class NormalizationError(InputError):
    """A direction vector that should be unit length is not."""


class DegenerateInstanceError(InputError):
    """The instance admits no meaningful answer (all-zero points, identical points, ...)."""


class ConvergenceError(FHPError, RuntimeError):
    """An iterative routine hit its cap before reaching its tolerance."""

    def __init__(self, message, lower=None, upper=None, residual=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.residual = residual


class DegeneracyError(FHPError, RuntimeError):
    """Labeling enumeration detected a point set that is not in general position."""


class GenerationError(FHPError, RuntimeError):
    """A randomized generator exhausted its retry budget."""


class InvariantViolation(FHPError, AssertionError):
    """A checked invariant failed on a produced artifact."""
