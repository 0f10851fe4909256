"""
Strict LMI feasibility by margin maximization.

For a homogeneous BlockLmi the solver maximizes t subject to

    B(X) - t I >= 0      for every block that must be positive definite,
    -B(X) - t I >= 0     for every block that must be negative definite,
    sum_v trace(X_v) = budget,

with a log-det barrier and equality-constrained Newton steps. The LMI is
strictly feasible iff the optimal margin t* is positive.
"""

import logging
import time
import warnings
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from scipy import linalg

from ..errors import ArgumentError
from ..models.core import BlockSense, FeasibilityResult, FeasibilityStatus
from ..models.schema import SolverOptions
from .lmi import BlockLmi

logger = logging.getLogger(__name__)

_ALPHA = 0.01
_BETA = 0.5
_MIN_STEP = 1e-14
_NEWTON_TOL = 1e-10


def symmetric_eigen(Mtx: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors of (M + M^T)/2"""
    M = np.asarray(Mtx, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ArgumentError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ArgumentError("matrix has non-finite entries")
    return linalg.eigh(0.5 * (M + M.T))


@dataclass
class _FlatBlock:
    """S(y) = sum_k y_k D[k] for y = (svec variables, t)"""

    name: str
    D: np.ndarray  # (K+1, d, d)


def _svec_index(variables: Tuple[Tuple[str, int], ...]) -> List[Tuple[str, int, int]]:
    index = []
    for name, d in variables:
        for a in range(d):
            for b in range(a, d):
                index.append((name, a, b))
    return index


def _flatten(
    lmi: BlockLmi,
) -> Tuple[List[_FlatBlock], np.ndarray, List[Tuple[str, int, int]]]:
    index = _svec_index(lmi.variables)
    K = len(index)
    flat = []
    for block in lmi.blocks:
        sign = 1.0 if block.sense is BlockSense.POSITIVE else -1.0
        if block.constant is not None and np.any(block.constant):
            raise ArgumentError(f"block {block.name} is not homogeneous")
        D = np.zeros((K + 1, block.dim, block.dim))
        for k, (name, a, b) in enumerate(index):
            for term in block.terms:
                if term.variable != name:
                    continue
                fa = term.factor[a]
                fb = term.factor[b]
                outer = np.outer(fa, fb)
                if a != b:
                    outer = outer + outer.T
                D[k] += sign * term.weight * outer
            D[k] = 0.5 * (D[k] + D[k].T)
        D[K] = -np.eye(block.dim)
        flat.append(_FlatBlock(block.name, D))
    # trace budget row
    a = np.zeros(K + 1)
    for k, (name, i, j) in enumerate(index):
        if i == j:
            a[k] = 1.0
    return flat, a, index


def _assignment(
    lmi: BlockLmi, index: List[Tuple[str, int, int]], z: np.ndarray
) -> Dict[str, np.ndarray]:
    out = {name: np.zeros((d, d)) for name, d in lmi.variables}
    for value, (name, a, b) in zip(z, index):
        out[name][a, b] = value
        out[name][b, a] = value
    return out


def _block_values(flat: List[_FlatBlock], y: np.ndarray) -> List[np.ndarray]:
    return [np.tensordot(y, b.D, axes=1) for b in flat]


def _barrier(values: List[np.ndarray]) -> Optional[Tuple[float, List[np.ndarray]]]:
    """(-sum log det S_b, inverse Cholesky factors) or None outside the domain"""
    total = 0.0
    inverses = []
    for S in values:
        try:
            L = linalg.cholesky(S, lower=True)
        except linalg.LinAlgError:
            return None
        total -= 2.0 * float(np.sum(np.log(np.diag(L))))
        inverses.append(linalg.solve_triangular(L, np.eye(S.shape[0]), lower=True))
    return total, inverses


def verify_certificate(
    lmi: BlockLmi, assignment: Mapping[str, np.ndarray], tol: float
) -> bool:
    """Strict eigenvalue check of every block, independent of the solver path.

    Margins are compared against tol * scale, where scale is the mean
    absolute eigenvalue of the decision matrices.
    """
    values = lmi.evaluate(assignment)
    nuclear = 0.0
    total_dim = 0
    for name, d in lmi.variables:
        nuclear += float(np.sum(np.abs(symmetric_eigen(assignment[name])[0])))
        total_dim += d
    scale = nuclear / total_dim
    for block, value in zip(lmi.blocks, values):
        eigenvalues = symmetric_eigen(value)[0]
        if block.sense is BlockSense.POSITIVE:
            if not eigenvalues[0] > tol * scale:
                return False
        elif not eigenvalues[-1] < -tol * scale:
            return False
    return True


def solve_feasibility(
    lmi: BlockLmi, opts: Optional[SolverOptions] = None
) -> FeasibilityResult:
    opts = opts or SolverOptions()
    started = time.perf_counter()
    flat, a, index = _flatten(lmi)
    K = len(index)
    total_dim = sum(b.D.shape[1] for b in flat)
    budget = opts.trace_budget or float(sum(d for _, d in lmi.variables))

    # identity assignment scaled to the budget, margin below every eigenvalue
    natural = float(sum(d for _, d in lmi.variables))
    z0 = np.array([1.0 if i == j else 0.0 for _, i, j in index]) * budget / natural
    y = np.concatenate([z0, [0.0]])
    lowest = min(symmetric_eigen(S)[0][0] for S in _block_values(flat, y))
    y[K] = lowest - 1.0

    s = 1.0 / max(abs(y[K]), 1.0)
    iterations = 0
    status = FeasibilityStatus.MARGIN_NONPOSITIVE
    diagnostics: Dict[str, object] = {}
    settled = False
    ill_conditioned = 0

    c = np.zeros(K + 1)
    c[K] = -1.0  # minimize -t

    while not settled:
        centered = False
        for _ in range(opts.max_iterations):
            evaluated = _barrier(_block_values(flat, y))
            if evaluated is None:
                status = FeasibilityStatus.NUMERICAL_FAILURE
                diagnostics["reason"] = "iterate left the barrier domain"
                settled = True
                break
            phi, inverses = evaluated
            g = s * c
            H = np.zeros((K + 1, K + 1))
            for block, Linv in zip(flat, inverses):
                W = Linv @ block.D @ Linv.T  # (K+1, d, d)
                g -= np.einsum("kii->k", W)
                Wf = W.reshape(K + 1, -1)
                H += Wf @ Wf.T
            kkt = np.zeros((K + 2, K + 2))
            kkt[: K + 1, : K + 1] = H
            kkt[: K + 1, K + 1] = a
            kkt[K + 1, : K + 1] = a
            rhs = np.concatenate([-g, [0.0]])
            try:
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always", linalg.LinAlgWarning)
                    step = linalg.solve(kkt, rhs, assume_a="sym")[: K + 1]
                if caught:
                    ill_conditioned += 1
                    logger.debug(f"Ill-conditioned KKT system: {caught[-1].message}")
            except (linalg.LinAlgError, ValueError) as e:
                status = FeasibilityStatus.NUMERICAL_FAILURE
                diagnostics["reason"] = f"KKT solve failed: {e}"
                settled = True
                break
            decrement = float(-g @ step)
            if decrement / 2.0 <= _NEWTON_TOL:
                centered = True
                break

            f0 = s * float(c @ y) + phi
            alpha = 1.0
            while alpha >= _MIN_STEP:
                trial = y + alpha * step
                trial_eval = _barrier(_block_values(flat, trial))
                if trial_eval is not None:
                    f1 = s * float(c @ trial) + trial_eval[0]
                    if f1 <= f0 - _ALPHA * alpha * decrement:
                        break
                alpha *= _BETA
            if alpha < _MIN_STEP:
                logger.warning(f"Line search stalled at t={y[K]:.3e}, s={s:.3e}")
                status = FeasibilityStatus.NUMERICAL_FAILURE
                diagnostics["reason"] = "line search stalled"
                settled = True
                break
            y = y + alpha * step
            iterations += 1
            logger.debug(
                f"Newton step {iterations}: t={y[K]:.6e}, alpha={alpha:.3g}, "
                f"decrement={decrement:.3e}"
            )
        else:
            status = FeasibilityStatus.MAX_ITERATIONS
            settled = True

        if settled or not centered:
            break

        gap = total_dim / s
        upper = y[K] + gap
        if opts.early_decision and y[K] > opts.feas_tol * budget / natural:
            status = FeasibilityStatus.MARGIN_POSITIVE
            break
        if opts.early_decision and upper <= opts.feas_tol * budget / natural:
            status = FeasibilityStatus.MARGIN_NONPOSITIVE
            break
        if gap < opts.duality_gap_tol:
            status = (
                FeasibilityStatus.MARGIN_POSITIVE
                if y[K] > opts.feas_tol * budget / natural
                else FeasibilityStatus.MARGIN_NONPOSITIVE
            )
            break
        s *= opts.barrier_growth

    # report the margin at the natural budget (sum of dimensions)
    margin = float(y[K]) * natural / budget
    assignment = _assignment(lmi, index, y[:K])
    certificate = {k: v / budget for k, v in assignment.items()}
    feasible = margin > opts.feas_tol and verify_certificate(
        lmi, certificate, opts.feas_tol
    )
    if status is FeasibilityStatus.MARGIN_POSITIVE and not feasible:
        status = FeasibilityStatus.NUMERICAL_FAILURE
        diagnostics["reason"] = "certificate failed verification"
    elif status is not FeasibilityStatus.MARGIN_POSITIVE and feasible:
        diagnostics["note"] = "feasible iterate found before the solver finished"
    borderline = abs(margin) <= opts.feas_tol
    if borderline:
        diagnostics["borderline"] = True

    if ill_conditioned:
        diagnostics["ill_conditioned_steps"] = ill_conditioned
    diagnostics["wall_time"] = time.perf_counter() - started
    diagnostics["barrier_weight"] = s
    return FeasibilityResult(
        feasible=feasible,
        margin=margin,
        iterations=iterations,
        status=status,
        certificate=certificate if feasible else None,
        borderline=borderline,
        diagnostics=diagnostics,
    )
