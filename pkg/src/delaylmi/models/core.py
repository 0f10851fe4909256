"""
Core data models for delaylmi.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..errors import ArgumentError


class Normalization(Enum):
    """Scaling convention applied to orthogonal polynomials"""

    MONIC = "monic"
    SIGN_AT_MINUS_ONE = "sign_at_minus_one"


class BlockSense(Enum):
    """Required definiteness of an LMI block"""

    POSITIVE = "positive"  # block > 0
    NEGATIVE = "negative"  # block < 0


class FeasibilityStatus(Enum):
    """Outcome of a margin maximization"""

    MARGIN_POSITIVE = "margin_positive"
    MARGIN_NONPOSITIVE = "margin_nonpositive"
    MAX_ITERATIONS = "max_iterations"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class SystemModel:
    """Discrete-time delay system x(t+1) = A x(t) + A_d x(t - tau)"""

    A: np.ndarray
    A_d: np.ndarray
    tau: int = 1
    name: str = "system"

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=float)
        A_d = np.asarray(self.A_d, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ArgumentError("A must be a square matrix", field="A")
        if A_d.shape != A.shape:
            raise ArgumentError(
                f"A_d has shape {A_d.shape}, expected {A.shape}", field="A_d"
            )
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(A_d))):
            raise ArgumentError("system matrices must be finite")
        if int(self.tau) < 0:
            raise ArgumentError("delay must be nonnegative", field="tau", value=self.tau)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "A_d", A_d)
        object.__setattr__(self, "tau", int(self.tau))

    @property
    def n_x(self) -> int:
        return int(self.A.shape[0])

    def with_tau(self, tau: int) -> "SystemModel":
        """Same matrices, different delay"""
        return SystemModel(self.A, self.A_d, tau, self.name)


@dataclass(frozen=True)
class LmiSpec:
    """Multiplicity m and strictly decreasing degrees nu_1 > ... > nu_m >= 0"""

    m: int
    nus: Tuple[int, ...]

    def __post_init__(self) -> None:
        nus = tuple(int(v) for v in self.nus)
        object.__setattr__(self, "nus", nus)
        if self.m < 1:
            raise ArgumentError("multiplicity m must be positive", field="m", value=self.m)
        if len(nus) != self.m:
            raise ArgumentError(
                f"expected {self.m} degrees, got {len(nus)}", field="nus", value=nus
            )
        if nus[-1] < 0:
            raise ArgumentError("degrees must be nonnegative", field="nus", value=nus)
        if any(a <= b for a, b in zip(nus, nus[1:])):
            raise ArgumentError(
                "degrees must be strictly decreasing", field="nus", value=nus
            )

    @classmethod
    def default(cls, m: int, nu1: int) -> "LmiSpec":
        """nu_j = nu_1 - (j - 1)"""
        if nu1 < m - 1:
            raise ArgumentError(
                f"nu1={nu1} too small for m={m}", field="nu1", value=nu1
            )
        return cls(m, tuple(nu1 - j for j in range(m)))

    @property
    def nu1(self) -> int:
        return self.nus[0]

    def label(self) -> str:
        return f"m={self.m}, nu=({','.join(str(v) for v in self.nus)})"


@dataclass
class FeasibilityResult:
    """Outcome of deciding one LMI"""

    feasible: bool
    margin: float
    iterations: int
    status: FeasibilityStatus
    certificate: Optional[Dict[str, np.ndarray]] = None
    borderline: bool = False
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to JSON-serializable dict"""
        return {
            "feasible": self.feasible,
            "margin": self.margin,
            "iterations": self.iterations,
            "status": self.status.value,
            "borderline": self.borderline,
            "certificate": (
                {k: v.tolist() for k, v in self.certificate.items()}
                if self.certificate is not None
                else None
            ),
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True)
class DelayPoint:
    """Certification outcome at one delay value"""

    tau: int
    feasible: bool
    margin: Optional[float]
    iterations: int = 0
    status: Optional[str] = None
    wall_time: float = 0.0


@dataclass
class DelayRange:
    """Result of scanning a delay range for one LMI spec"""

    spec: LmiSpec
    points: List[DelayPoint]
    scan_start: int
    scan_stop: int

    @property
    def feasible_taus(self) -> List[int]:
        return [p.tau for p in self.points if p.feasible]

    @property
    def tau_min_feasible(self) -> Optional[int]:
        taus = self.feasible_taus
        return min(taus) if taus else None

    @property
    def tau_max_feasible(self) -> Optional[int]:
        taus = self.feasible_taus
        return max(taus) if taus else None

    @property
    def has_left_edge(self) -> bool:
        """True when the feasible set starts after an infeasible prefix"""
        low = self.tau_min_feasible
        first_admissible = max(self.scan_start, self.spec.nu1 + 1)
        return low is not None and low > first_admissible

    @property
    def is_interval(self) -> bool:
        taus = self.feasible_taus
        return not taus or taus == list(range(taus[0], taus[-1] + 1))

    @property
    def tau_max_positive_margin(self) -> Optional[int]:
        """Largest tau whose solver margin is positive, even if below feas_tol.

        Barrier iterates are strictly interior; the feasible flag additionally
        requires margin > feas_tol.
        """
        taus = [p.tau for p in self.points if p.margin is not None and p.margin > 0]
        return max(taus) if taus else None

    @property
    def margins(self) -> List[Optional[float]]:
        return [p.margin for p in self.points]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.spec.m,
            "nus": list(self.spec.nus),
            "scan": [self.scan_start, self.scan_stop],
            "tau_min_feasible": self.tau_min_feasible,
            "tau_max_feasible": self.tau_max_feasible,
            "tau_max_positive_margin": self.tau_max_positive_margin,
            "points": [
                {
                    "tau": p.tau,
                    "feasible": p.feasible,
                    "margin": p.margin,
                    "iterations": p.iterations,
                    "status": p.status,
                }
                for p in self.points
            ],
        }


@dataclass(frozen=True)
class HierarchyViolation:
    """A table cell whose tau_max decreased relative to its neighbour"""

    direction: str  # "right" (nu_1 -> nu_1+1) or "down" (l -> l+1)
    source: Tuple[int, int]
    target: Tuple[int, int]
    source_tau: Optional[int]
    target_tau: Optional[int]


@dataclass
class HierarchyTable:
    """tau_max for each admissible (l, nu_1) cell; cell exists iff l - 1 <= nu_1"""

    l_max: int
    nu_max: int
    cells: Dict[Tuple[int, int], DelayRange]
    violations: List[HierarchyViolation] = field(default_factory=list)

    @property
    def entries(self) -> Dict[Tuple[int, int], Optional[int]]:
        return {key: rng.tau_max_feasible for key, rng in sorted(self.cells.items())}

    def row(self, ell: int) -> List[Optional[int]]:
        return [
            self.cells[(ell, nu)].tau_max_feasible
            for nu in range(ell - 1, self.nu_max + 1)
            if (ell, nu) in self.cells
        ]


@dataclass
class RunRecord:
    """One certification outcome, reproducible from its inputs"""

    system: str
    m: int
    nus: Tuple[int, ...]
    tau: int
    feasible: bool
    margin: Optional[float]
    iterations: int
    nodv: int
    wall_time: float
    status: str = ""


@dataclass
class RunReport:
    """Records plus the metadata needed to reproduce them"""

    records: List[RunRecord] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)
