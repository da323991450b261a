"""Exception types shared by the engines, oracles, and statistics helpers."""


class BudgetExceededError(RuntimeError):
    """A trajectory ran past its round/step cap without reaching absorption."""


class InsufficientDataError(ValueError):
    """A statistical test was given too few recorded increments or samples."""


class StateSpaceTooLargeError(RuntimeError):
    """Exact chain enumeration would exceed the configured state bound."""


class SolverNotConvergedError(RuntimeError):
    """A linear solve finished with residual above the required tolerance."""
