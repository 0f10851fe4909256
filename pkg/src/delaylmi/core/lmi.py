"""
Stability LMI for x(t+1) = A x(t) + A_d x(t - tau).

The LMI is kept in congruence form: each block is a sum of terms
weight * F^T X F over decision matrices X in (P, Q, R_1, ..., R_m). The
M-block bounds the forward difference of the Lyapunov-Krasovskii
functional as a quadratic form in

    Phi(t) = col{x(t), x(t-tau), phi_0(t)/tau, ..., phi_{nu1-1}(t)/tau},
    phi_j(t) = sum_{i<tau} p_{1j}(i) x(t-tau+i).
"""

import itertools
import logging
from dataclasses import dataclass
from math import factorial
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..errors import ArgumentError, HorizonError
from ..models.core import BlockSense, LmiSpec, Normalization, SystemModel
from .coeffs import lambda_row, zeta_matrix
from .ineq import chain_count
from .polys import build_basis

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StructuralMatrices:
    """Scalar-valued structure (before Kronecker with I_nx) plus the lifted blocks"""

    n_x: int
    tau: int
    nu1: int
    e1: np.ndarray
    e2: np.ndarray
    script_A: np.ndarray
    T: np.ndarray
    Gamma: np.ndarray
    LambdaUnderbar: np.ndarray
    Ztilde: Tuple[np.ndarray, ...]
    chi: Tuple[np.ndarray, ...]

    @property
    def phi_dim(self) -> int:
        """Dimension of Phi(t)"""
        return self.n_x * (self.nu1 + 2)

    @property
    def state_dim(self) -> int:
        """Dimension of the extended state x~(t)"""
        return self.n_x * (self.nu1 + 1)


@dataclass(frozen=True)
class CongruenceTerm:
    """weight * factor^T X factor for the decision matrix named ``variable``"""

    variable: str
    factor: np.ndarray
    weight: float = 1.0


@dataclass(frozen=True)
class LmiBlock:
    name: str
    dim: int
    sense: BlockSense
    terms: Tuple[CongruenceTerm, ...]
    constant: Optional[np.ndarray] = None

    def evaluate(self, assignment: Mapping[str, np.ndarray]) -> np.ndarray:
        out = (
            np.zeros((self.dim, self.dim))
            if self.constant is None
            else np.array(self.constant, dtype=float)
        )
        for term in self.terms:
            X = np.asarray(assignment[term.variable], dtype=float)
            out = out + term.weight * (term.factor.T @ X @ term.factor)
        return 0.5 * (out + out.T)


@dataclass(frozen=True)
class BlockLmi:
    """Decision matrix dimensions and the constraint blocks over them"""

    variables: Tuple[Tuple[str, int], ...]
    blocks: Tuple[LmiBlock, ...]

    @property
    def dims(self) -> Dict[str, int]:
        return dict(self.variables)

    @property
    def nodv(self) -> int:
        return sum(d * (d + 1) // 2 for _, d in self.variables)

    def block(self, name: str) -> LmiBlock:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def evaluate(self, assignment: Mapping[str, np.ndarray]) -> List[np.ndarray]:
        """Dense value of every block; checks assignment dimensions"""
        for name, d in self.variables:
            if name not in assignment:
                raise ArgumentError(f"assignment lacks variable {name}", field=name)
            if np.shape(assignment[name]) != (d, d):
                raise ArgumentError(
                    f"{name} has shape {np.shape(assignment[name])}, expected {(d, d)}",
                    field=name,
                )
        return [b.evaluate(assignment) for b in self.blocks]

    def scaled(self, factor: float) -> "BlockLmi":
        """Same LMI with every term weight multiplied by ``factor``"""
        return BlockLmi(
            self.variables,
            tuple(
                LmiBlock(
                    b.name,
                    b.dim,
                    b.sense,
                    tuple(
                        CongruenceTerm(t.variable, t.factor, t.weight * factor)
                        for t in b.terms
                    ),
                    None if b.constant is None else b.constant * factor,
                )
                for b in self.blocks
            ),
        )


def evaluate_block(block: LmiBlock, assignment: Mapping[str, np.ndarray]) -> np.ndarray:
    return block.evaluate(assignment)


def _check_admissible(sys: SystemModel, spec: LmiSpec) -> None:
    if sys.tau < 1 or spec.nu1 > sys.tau - 1:
        raise HorizonError(
            f"degree exceeds horizon: nu_1={spec.nu1} needs tau >= {spec.nu1 + 1}, "
            f"got tau={sys.tau}",
            field="nu1",
            value=spec.nu1,
        )


def structural(sys: SystemModel, spec: LmiSpec) -> StructuralMatrices:
    _check_admissible(sys, spec)
    n, tau, nu1 = sys.n_x, sys.tau, spec.nu1
    eye = np.eye(n)
    width = nu1 + 2

    def lift(row: np.ndarray) -> np.ndarray:
        return np.kron(row, eye)

    sel = np.eye(width)
    e1 = lift(sel[0:1])
    e2 = lift(sel[1:2])
    script_A = sys.A @ e1 + sys.A_d @ e2

    T = np.diag([1.0, 1.0] + [float(tau)] * nu1)
    G = np.zeros((nu1 + 1, width))
    G[0, 0] = 1.0
    for l in range(nu1):  # noqa: E741
        G[1 + l, 2 + l] = float(tau)
    Gamma = lift(G)

    rows = [script_A]
    for l in range(nu1):  # noqa: E741
        lam = np.array([float(v) for v in lambda_row(tau, l, nu1).as_list()])
        rows.append(lift((lam @ T).reshape(1, -1)))
    LambdaUnderbar = np.vstack(rows)

    ztilde = []
    chis = []
    for k, nu_k in enumerate(spec.nus, start=1):
        Z = zeta_matrix(tau, k, nu1, nu_k)
        ztilde.append(Z.as_array() @ T)
        chis.append(Z.chi_array())

    return StructuralMatrices(
        n, tau, nu1, e1, e2, script_A, T, Gamma, LambdaUnderbar, tuple(ztilde), tuple(chis)
    )


def variable_names(spec: LmiSpec) -> List[str]:
    return ["P", "Q"] + [f"R{k}" for k in range(1, spec.m + 1)]


def assemble(sys: SystemModel, spec: LmiSpec) -> BlockLmi:
    """P > 0, Q > 0, R_k > 0 and M = Psi1 + Psi2 - Psi3 < 0"""
    S = structural(sys, spec)
    n = sys.n_x
    eye = np.eye(n)

    terms: List[CongruenceTerm] = [
        CongruenceTerm("P", S.LambdaUnderbar, 1.0),
        CongruenceTerm("P", S.Gamma, -1.0),
        CongruenceTerm("Q", S.e1, 1.0),
        CongruenceTerm("Q", S.e2, -1.0),
    ]
    diff = S.script_A - S.e1
    for k in range(1, spec.m + 1):
        terms.append(CongruenceTerm(f"R{k}", diff, float(chain_count(sys.tau, k))))
    for k, (Zt, chi) in enumerate(zip(S.Ztilde, S.chi), start=1):
        for j in range(Zt.shape[0]):
            factor = np.kron(Zt[j : j + 1], eye)
            terms.append(
                CongruenceTerm(f"R{k}", factor, -float(chi[j]) / factorial(k - 1))
            )

    dims = [("P", S.state_dim), ("Q", n)] + [(f"R{k}", n) for k in range(1, spec.m + 1)]
    blocks = [
        LmiBlock(name, d, BlockSense.POSITIVE, (CongruenceTerm(name, np.eye(d), 1.0),))
        for name, d in dims
    ]
    blocks.append(LmiBlock("M", S.phi_dim, BlockSense.NEGATIVE, tuple(terms)))
    logger.debug(
        f"Assembled LMI tau={sys.tau}, {spec.label()}: M is {S.phi_dim}x{S.phi_dim}"
    )
    return BlockLmi(tuple(dims), tuple(blocks))


# Trajectory helpers


def simulate(
    sys: SystemModel,
    history: Optional[np.ndarray],
    steps: int,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Rows are x(-tau), ..., x(0), x(1), ..., x(steps).

    A missing history is drawn from ``rng`` (standard normal).
    """
    n, tau = sys.n_x, sys.tau
    if history is None:
        rng = rng if rng is not None else np.random.default_rng(0)
        history = rng.standard_normal((tau + 1, n))
    history = np.asarray(history, dtype=float).reshape(tau + 1, n)
    out = np.zeros((tau + 1 + steps, n))
    out[: tau + 1] = history
    for k in range(tau, tau + steps):
        out[k + 1] = sys.A @ out[k] + sys.A_d @ out[k - tau]
    return out


def _phis(S: StructuralMatrices, trajectory: np.ndarray, t: int) -> np.ndarray:
    if S.nu1 == 0:
        return np.zeros((0, S.n_x))
    basis = build_basis(S.tau, 1, S.nu1 - 1, Normalization.SIGN_AT_MINUS_ONE)
    P = np.array([[float(p(i)) for i in range(S.tau)] for p in basis.polys])
    return P @ trajectory[t - S.tau : t]


def phi_tilde_at(S: StructuralMatrices, trajectory: np.ndarray, t: int) -> np.ndarray:
    """Phi(t) for row index t of a trajectory (t >= tau)"""
    head = [trajectory[t], trajectory[t - S.tau]]
    return np.concatenate(head + list(_phis(S, trajectory, t) / S.tau))


def x_tilde_at(S: StructuralMatrices, trajectory: np.ndarray, t: int) -> np.ndarray:
    return np.concatenate([trajectory[t]] + list(_phis(S, trajectory, t)))


def lkf_value(
    S: StructuralMatrices,
    spec: LmiSpec,
    assignment: Mapping[str, np.ndarray],
    trajectory: np.ndarray,
    t: int,
) -> float:
    """V at row index t, from the nested-sum definition of each term"""
    tau = S.tau
    xt = x_tilde_at(S, trajectory, t)
    value = float(xt @ assignment["P"] @ xt)
    window = trajectory[t - tau : t]
    value += float(np.einsum("ij,jk,ik->", window, assignment["Q"], window))
    rho = trajectory[t - tau + 1 : t + 1] - trajectory[t - tau : t]
    for k in range(1, spec.m + 1):
        R = assignment[f"R{k}"]
        g = np.einsum("ij,jk,ik->i", rho, R, rho)
        # tau-1 >= i_1 >= ... >= i_k, then s from i_k to tau-1
        for chain in itertools.combinations_with_replacement(range(tau), k):
            value += float(g[chain[0] :].sum())
    return value


def delta_v_bound_check(
    sys: SystemModel,
    spec: LmiSpec,
    P: np.ndarray,
    Q: np.ndarray,
    R: List[np.ndarray],
    trajectory: np.ndarray,
) -> float:
    """max_t [V(t+1) - V(t) - Phi(t)^T M Phi(t)] over the trajectory.

    The trajectory follows ``simulate``'s layout. The result is at most
    rounding noise whenever the M-block bounds the functional's difference.
    """
    tau = sys.tau
    trajectory = np.asarray(trajectory, dtype=float)
    if trajectory.ndim != 2 or trajectory.shape[0] < tau + 2:
        raise ArgumentError(
            f"trajectory needs at least tau+2={tau + 2} samples", field="trajectory"
        )
    if len(R) != spec.m:
        raise ArgumentError(f"expected {spec.m} R matrices, got {len(R)}", field="R")
    lmi = assemble(sys, spec)
    S = structural(sys, spec)
    assignment = {"P": P, "Q": Q, **{f"R{k}": Rk for k, Rk in enumerate(R, start=1)}}
    M = lmi.block("M").evaluate(assignment)

    worst = -np.inf
    for t in range(tau, trajectory.shape[0] - 1):
        dv = lkf_value(S, spec, assignment, trajectory, t + 1) - lkf_value(
            S, spec, assignment, trajectory, t
        )
        phi = phi_tilde_at(S, trajectory, t)
        worst = max(worst, dv - float(phi @ M @ phi))
    return float(worst)
