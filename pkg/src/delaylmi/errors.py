"""
Exception hierarchy for delaylmi.

Solver outcomes are never raised; they travel in ``FeasibilityResult.status``.
"""

from pathlib import Path
from typing import Any, Optional, Union


class DelayLmiError(Exception):
    """Base class for delaylmi errors."""

    pass


class DomainError(DelayLmiError, ValueError):
    """Raised when an argument lies outside a function's mathematical domain."""

    def __init__(self, message: str, field: Optional[str] = None, value: Any = None):
        self.field = field
        self.value = value
        super().__init__(message)


class DegreeOverflowError(DomainError):
    """Raised when a polynomial degree reaches the number of support points."""

    pass


class ArgumentError(DelayLmiError, ValueError):
    """Raised when parameters violate an ordering or precondition."""

    def __init__(self, message: str, field: Optional[str] = None, value: Any = None):
        self.field = field
        self.value = value
        super().__init__(message)


class HorizonError(ArgumentError):
    """Raised when the projection degree exceeds the delay horizon."""

    pass


class SystemFileError(DelayLmiError):
    """Raised when a system definition file cannot be read or validated."""

    def __init__(self, message: str, path: Optional[Union[str, Path]] = None):
        self.path = str(path) if path is not None else None
        super().__init__(f"{path}: {message}" if path is not None else message)
