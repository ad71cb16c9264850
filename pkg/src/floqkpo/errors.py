"""Error types shared across the toolkit, mapped to CLI exit codes."""


class InvalidInput(ValueError):
    """Bad user input (CLI exit code 2)."""


class NumericalFailure(RuntimeError):
    """NaN/Inf or convergence failure during integration (CLI exit code 3)."""


class ResourceLimit(RuntimeError):
    """Problem size exceeds a documented hard limit (CLI exit code 4)."""
