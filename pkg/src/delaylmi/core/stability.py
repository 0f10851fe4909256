"""
Stability analyses built on the LMI certificate and the lifted system.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ArgumentError
from ..models.core import (
    DelayPoint,
    DelayRange,
    FeasibilityResult,
    HierarchyTable,
    HierarchyViolation,
    LmiSpec,
    SystemModel,
)
from ..models.schema import SolverOptions
from .lmi import assemble
from .sdp import solve_feasibility

logger = logging.getLogger(__name__)

UNIT_CIRCLE_TOL = 1e-10


def certify(
    sys: SystemModel, spec: LmiSpec, opts: Optional[SolverOptions] = None
) -> FeasibilityResult:
    """Decide the delay-dependent stability LMI for one (system, spec)"""
    result = solve_feasibility(assemble(sys, spec), opts)
    logger.info(
        f"tau={sys.tau} {spec.label()}: "
        f"{'feasible' if result.feasible else 'infeasible'} "
        f"(margin {result.margin:.3e}, {result.status.value})"
    )
    return result


def _certify_point(
    sys_template: SystemModel, spec: LmiSpec, tau: int, opts: Optional[SolverOptions]
) -> DelayPoint:
    if tau < 1 or spec.nu1 > tau - 1:
        return DelayPoint(tau, False, None, status="inadmissible")
    started = time.perf_counter()
    result = certify(sys_template.with_tau(tau), spec, opts)
    return DelayPoint(
        tau,
        result.feasible,
        result.margin,
        result.iterations,
        result.status.value,
        time.perf_counter() - started,
    )


def max_delay(
    sys_template: SystemModel,
    spec: LmiSpec,
    taus: Iterable[int],
    opts: Optional[SolverOptions] = None,
    jobs: int = 1,
) -> DelayRange:
    """Certify every tau in the scan, ascending; no monotonicity is assumed.

    Delays an LmiSpec cannot be bound to (nu_1 > tau - 1) are recorded as
    not certified.
    """
    scan = sorted(set(int(t) for t in taus))
    if not scan:
        raise ArgumentError("delay scan range is empty", field="taus")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(
                pool.map(lambda t: _certify_point(sys_template, spec, t, opts), scan)
            )
    else:
        points = [_certify_point(sys_template, spec, t, opts) for t in scan]
    rng = DelayRange(spec, points, scan[0], scan[-1])
    logger.info(
        f"{spec.label()}: tau_M={rng.tau_max_feasible}, tau_min={rng.tau_min_feasible}"
    )
    return rng


# Lifting


def companion_matrix(A: np.ndarray, A_d: np.ndarray, tau: int) -> np.ndarray:
    """State matrix of col{x(t), ..., x(t-tau)}; tau = 0 gives A + A_d"""
    A = np.asarray(A, dtype=float)
    A_d = np.asarray(A_d, dtype=float)
    if tau == 0:
        return A + A_d
    n = A.shape[0]
    size = (tau + 1) * n
    C = np.zeros((size, size))
    C[:n, :n] = A
    C[:n, tau * n :] = A_d
    C[n:, :-n] = np.eye(tau * n)
    return C


def spectral_radius(A: np.ndarray, A_d: np.ndarray, tau: int) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(companion_matrix(A, A_d, tau)))))


def lifting_oracle(sys: SystemModel) -> bool:
    """Exact stability test: spectral radius of the lifted system below one"""
    return spectral_radius(sys.A, sys.A_d, sys.tau) < 1.0 - UNIT_CIRCLE_TOL


@dataclass
class LiftingScan:
    """Stable delays found by the lifting oracle over a scan"""

    taus: List[int]
    stable: List[int]
    radii: List[float]

    @property
    def intervals(self) -> List[Tuple[int, int]]:
        out: List[Tuple[int, int]] = []
        for t in self.stable:
            if out and t == out[-1][1] + 1:
                out[-1] = (out[-1][0], t)
            else:
                out.append((t, t))
        return out

    def render(self) -> str:
        if not self.stable:
            return "empty"
        return " U ".join(f"[{lo}, {hi}]" for lo, hi in self.intervals)


def lifting_scan(
    A: np.ndarray, A_d: np.ndarray, taus: Iterable[int], jobs: int = 1
) -> LiftingScan:
    scan = sorted(set(int(t) for t in taus))
    if not scan:
        raise ArgumentError("delay scan range is empty", field="taus")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            radii = list(pool.map(lambda t: spectral_radius(A, A_d, t), scan))
    else:
        radii = [spectral_radius(A, A_d, t) for t in scan]
    stable = [t for t, r in zip(scan, radii) if r < 1.0 - UNIT_CIRCLE_TOL]
    return LiftingScan(scan, stable, radii)


def nodv(n_x: int, nu1: int, m: int) -> int:
    """Scalar decision variables: P of size n_x(nu1+1), Q and R_1..R_m of size n_x"""
    if n_x < 1 or nu1 < 0 or m < 1:
        raise ArgumentError(f"invalid sizes n_x={n_x}, nu1={nu1}, m={m}")

    def s(n: int) -> int:
        return n * (n + 1) // 2

    return s(n_x * (nu1 + 1)) + (m + 1) * s(n_x)


def nodv_lifting(n_x: int, tau: int) -> int:
    """Unknowns of the discrete Lyapunov inequality for the lifted system"""
    size = (tau + 1) * n_x
    return size * (size + 1) // 2


# Hierarchy


def hierarchy_specs(l_max: int, nu_max: int) -> List[Tuple[Tuple[int, int], LmiSpec]]:
    """Admissible (l, nu_1) cells in row-major order, l - 1 <= nu_1"""
    if l_max < 1 or nu_max < 0:
        raise ArgumentError(f"invalid table bounds l_max={l_max}, nu_max={nu_max}")
    return [
        ((ell, nu1), LmiSpec.default(ell, nu1))
        for ell in range(1, l_max + 1)
        for nu1 in range(ell - 1, nu_max + 1)
    ]


def _tau_key(value: Optional[int]) -> int:
    return -1 if value is None else value


def hierarchy_violations(
    cells: Dict[Tuple[int, int], DelayRange],
) -> List[HierarchyViolation]:
    """Cells whose tau_max decreases moving right (nu_1+1) or down (l+1)"""
    found = []
    for (ell, nu1), rng in sorted(cells.items()):
        here = rng.tau_max_feasible
        for direction, key in (("right", (ell, nu1 + 1)), ("down", (ell + 1, nu1))):
            other = cells.get(key)
            if other is None:
                continue
            there = other.tau_max_feasible
            if _tau_key(there) < _tau_key(here):
                found.append(HierarchyViolation(direction, (ell, nu1), key, here, there))
    for v in found:
        logger.warning(
            f"Hierarchy violation ({v.direction}): {v.source} -> {v.target}, "
            f"{v.source_tau} > {v.target_tau}"
        )
    return found


def hierarchy_table(
    sys: SystemModel,
    l_max: int,
    nu_max: int,
    taus: Iterable[int],
    opts: Optional[SolverOptions] = None,
    jobs: int = 1,
) -> HierarchyTable:
    scan = sorted(set(int(t) for t in taus))
    cells: Dict[Tuple[int, int], DelayRange] = {}
    for key, spec in hierarchy_specs(l_max, nu_max):
        cells[key] = max_delay(sys, spec, scan, opts, jobs)
    return HierarchyTable(l_max, nu_max, cells, hierarchy_violations(cells))


def soundness_violations(sys_template: SystemModel, delay_range: DelayRange) -> List[int]:
    """Delays certified by the LMI that the lifting oracle finds unstable"""
    return [
        t
        for t in delay_range.feasible_taus
        if not lifting_oracle(sys_template.with_tau(t))
    ]


def ascending_scan(lo: int, hi: int) -> Sequence[int]:
    if hi < lo:
        raise ArgumentError(f"empty scan range {lo}:{hi}")
    return range(lo, hi + 1)
