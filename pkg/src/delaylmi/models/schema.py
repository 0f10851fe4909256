"""
Validated schemas for solver options and system definition files.
"""

import math
from typing import Annotated, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .core import SystemModel


class SolverOptions(BaseModel):
    """Tolerances and limits for the margin-maximizing barrier solver."""

    model_config = ConfigDict(frozen=True)

    feas_tol: Annotated[float, Field(gt=0.0)] = Field(
        default=1e-6, description="Decision threshold on the margin t*"
    )
    duality_gap_tol: Annotated[float, Field(gt=0.0)] = Field(
        default=1e-8, description="Stop once the barrier gap bound falls below this"
    )
    max_iterations: Annotated[int, Field(ge=1)] = Field(
        default=200, description="Newton steps allowed per centering round"
    )
    barrier_growth: Annotated[float, Field(gt=1.0)] = Field(
        default=20.0, description="Factor applied to the barrier weight per round"
    )
    early_decision: bool = Field(
        default=False,
        description="Stop as soon as the sign of the margin is settled",
    )
    trace_budget: Optional[Annotated[float, Field(gt=0.0)]] = Field(
        default=None,
        description="Sum of variable traces; defaults to the total variable dimension",
    )


class SystemFile(BaseModel):
    """JSON system definition with row-major matrices."""

    name: str = Field(..., min_length=1, description="System name")
    n_x: Annotated[int, Field(ge=1)] = Field(..., description="State dimension")
    A: List[float] = Field(..., description="Row-major n_x*n_x system matrix")
    A_d: List[float] = Field(..., description="Row-major n_x*n_x delayed matrix")
    tau: Optional[Annotated[int, Field(ge=0)]] = Field(
        default=None, description="Default delay"
    )
    scan: Optional[Tuple[int, int]] = Field(
        default=None, description="Default inclusive delay scan range"
    )
    description: str = Field(default="", description="Free-form provenance note")

    @field_validator("A", "A_d")
    @classmethod
    def validate_finite(cls, v: List[float]) -> List[float]:
        if not all(math.isfinite(x) for x in v):
            raise ValueError("matrix entries must be finite")
        return v

    @field_validator("scan")
    @classmethod
    def validate_scan(cls, v: Optional[Tuple[int, int]]) -> Optional[Tuple[int, int]]:
        if v is not None and (v[0] < 0 or v[1] < v[0]):
            raise ValueError(f"scan range {v[0]}:{v[1]} is empty or negative")
        return v

    @model_validator(mode="after")
    def validate_shapes(self) -> "SystemFile":
        expected = self.n_x * self.n_x
        for label, values in (("A", self.A), ("A_d", self.A_d)):
            if len(values) != expected:
                raise ValueError(
                    f"{label} has {len(values)} entries, expected n_x^2 = {expected}"
                )
        return self

    def matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        shape = (self.n_x, self.n_x)
        return (
            np.asarray(self.A, dtype=float).reshape(shape),
            np.asarray(self.A_d, dtype=float).reshape(shape),
        )

    def to_model(self, tau: Optional[int] = None) -> SystemModel:
        """Build a SystemModel, taking tau from the argument, then the file, then 1"""
        A, A_d = self.matrices()
        if tau is None:
            tau = self.tau if self.tau is not None else 1
        return SystemModel(A, A_d, tau, self.name)
