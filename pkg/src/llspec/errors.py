"""Exception types shared across the library."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class CapacityError(RuntimeError):
    """Requested level exceeds the configured size bound (see LLSPEC_NMAX)."""


class ConvergenceError(RuntimeError):
    """Iterative solver failed to reach its tolerance within the sweep limit."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InsufficientDataError(RuntimeError):
    """Not enough usable data points for a statistical estimate."""
