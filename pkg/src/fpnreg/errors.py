"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class ContractError(RuntimeError):
    """Raised when a caller invokes an operation outside its contract
    (e.g. refining an already-regular subspace)."""
