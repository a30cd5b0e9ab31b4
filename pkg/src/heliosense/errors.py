"""Exception types shared across the package."""


class HeliosenseError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(HeliosenseError, ValueError):
    """A physical input is out of its allowed range."""


class ConfinementError(HeliosenseError, ValueError):
    """A trap curvature has the wrong sign: no confinement along that axis."""


class ForbiddenTransitionError(HeliosenseError, ValueError):
    """A dipole matrix element is zero, so the requested drive cannot couple."""


class ResonantDriveError(HeliosenseError, ZeroDivisionError):
    """Dispersive formulas evaluated at zero detuning."""


class InvalidPotentialError(HeliosenseError, ValueError):
    """The 1D potential does not support a bound spectrum."""


class ResolutionError(HeliosenseError, RuntimeError):
    """A discretized solve failed its convergence or resolution certification."""


class SolverConvergenceError(HeliosenseError, RuntimeError):
    """Iterative field solve did not reach tolerance within the sweep cap."""

    def __init__(self, message, residual=None, sweeps=None):
        super().__init__(message)
        self.residual = residual
        self.sweeps = sweeps


class PropagationError(HeliosenseError, RuntimeError):
    """Time propagation failed its step-halving error control."""


class ConfigError(HeliosenseError, ValueError):
    """A run configuration file is malformed or inconsistent."""
