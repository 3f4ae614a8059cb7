"""Exception hierarchy shared by every isinglab subpackage."""

from typing import Optional

# Process exit statuses of the isinglab command
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_SCHEMA = 4


class LabError(Exception):
    """Base class for every error raised by isinglab."""


class GeometryError(LabError, ValueError):
    pass


class CapacityError(LabError):
    """A site count or state-space size exceeds a configured cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class BoundaryConditionError(LabError, ValueError):
    pass


class NegativeFunctionError(LabError, ValueError):
    pass


class SolverError(LabError):
    pass


class FitError(LabError, ValueError):
    pass


class BudgetError(LabError):
    pass


class ConfigError(LabError, ValueError):
    """Invalid experiment configuration, located by a dotted field path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class SchemaMismatchError(LabError):
    def __init__(self, path: str, found: Optional[int], expected: int):
        super().__init__(f"{path}: schema version {found} (expected {expected})")
        self.path = path
        self.found = found
        self.expected = expected
