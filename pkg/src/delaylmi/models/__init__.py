"""
Data models for delaylmi.
"""

from .core import (
    BlockSense,
    DelayPoint,
    DelayRange,
    FeasibilityResult,
    FeasibilityStatus,
    HierarchyTable,
    HierarchyViolation,
    LmiSpec,
    Normalization,
    RunRecord,
    RunReport,
    SystemModel,
)
from .schema import SolverOptions, SystemFile

__all__ = [
    "Normalization",
    "BlockSense",
    "FeasibilityStatus",
    "SystemModel",
    "LmiSpec",
    "FeasibilityResult",
    "DelayPoint",
    "DelayRange",
    "HierarchyViolation",
    "HierarchyTable",
    "RunRecord",
    "RunReport",
    "SolverOptions",
    "SystemFile",
]
