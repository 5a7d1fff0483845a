"""Exception types shared across the package."""


class GKDVError(Exception):
    """Base class for all package errors."""


class GridMismatchError(GKDVError):
    """Two fields on different grids were combined."""


class UnsupportedOrderError(GKDVError):
    """Derivative order outside the supported range."""


class CoverageError(GKDVError):
    """Too many resample target points fell outside the source support."""


class DiscretizationError(GKDVError):
    """A solvability or resolution check failed at the current grid."""


class NonSolvableError(GKDVError):
    """Right-hand side violates the orthogonality needed for a solve."""


class EigenConvergenceError(GKDVError):
    """Iterative eigensolver failed to converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class PastBlowupError(GKDVError):
    """Closed-form reduced trajectory evaluated at or after blow-up time."""


class OutOfRegimeError(GKDVError):
    """Modulation parameter outside the validity range of the profiles."""


class SolverDivergenceError(GKDVError):
    """Time stepper produced unbounded or non-finite values."""

    def __init__(self, message, last_valid_time=None):
        super().__init__(message)
        self.last_valid_time = last_valid_time


class RegridError(GKDVError):
    """Window rescaling would lose too much of the soliton core."""


class DecompositionError(GKDVError):
    """Newton iteration for the modulation parameters did not converge."""


class GeometryError(GKDVError):
    """Requested measurement region is empty or inconsistent."""


class FitWindowError(GKDVError):
    """Not enough dynamic range in the trajectory for a rate fit."""


class ConfigError(GKDVError):
    """Invalid or unknown configuration input."""


class IntegrityError(GKDVError):
    """A persisted run directory is missing or has corrupt files."""


class TailTruncationWarning(UserWarning):
    """Integrand does not decay enough at the truncated boundary."""
