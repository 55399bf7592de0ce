"""Exception hierarchy shared across the toolkit.

Exit-code mapping used by the CLI: InputError -> 1, InfeasibilityError and
CapacityError -> 2.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class InputError(ToolkitError, ValueError):
    """Malformed or out-of-contract input."""


class CapacityError(ToolkitError):
    """Request exceeds a configured size cap (not a correctness issue)."""


class InfeasibilityError(ToolkitError):
    """Parameters fall outside the regime where a construction is possible.

    Carries the per-clause deficit so callers can see how far off the
    parameters were.
    """

    def __init__(self, message: str, deficit: int = 0, clause=None):
        super().__init__(message)
        self.deficit = deficit
        self.clause = clause


class ContractViolationError(ToolkitError):
    """An input failed a promise its producer was supposed to guarantee."""
