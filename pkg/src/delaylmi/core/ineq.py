"""
Multiple summation functionals and their polynomial lower bounds.

J_m(f) = sum_{i_1<N} sum_{i_2<=i_1} ... sum_{i_m<=i_{m-1}} f(i_m)^T R f(i_m)

The bounds project f onto discrete orthogonal polynomials: the function
bound uses the coordinates phi_j = sum_i p_{1j}(i) f(i), the difference
bound applies to rho(i) = f(i+1) - f(i) and additionally uses f(N), f(0).
"""

from dataclasses import dataclass
from math import comb, factorial
from typing import Optional

import numpy as np
from scipy import linalg

from ..errors import ArgumentError
from ..models.core import Normalization
from .coeffs import xi_matrix, zeta_matrix
from .polys import build_basis, weight


@dataclass(frozen=True)
class GridFunction:
    """Vector-valued samples f(0), f(1), ... with summation horizon N."""

    values: np.ndarray
    N: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2:
            raise ArgumentError("grid function values must be 1-D or 2-D")
        if self.N < 1:
            raise ArgumentError(f"horizon must be positive, got {self.N}", field="N")
        if values.shape[0] < self.N:
            raise ArgumentError(
                f"need at least N={self.N} samples, got {values.shape[0]}",
                field="values",
            )
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.shape[1])

    def differences(self) -> "GridFunction":
        """rho(i) = f(i+1) - f(i) for i < N"""
        if self.values.shape[0] < self.N + 1:
            raise ArgumentError(
                f"differences need samples through index N={self.N}", field="values"
            )
        v = self.values[: self.N + 1]
        return GridFunction(v[1:] - v[:-1], self.N)


def _check_spd(R: np.ndarray, n: int) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.shape != (n, n):
        raise ArgumentError(f"R has shape {R.shape}, expected {(n, n)}", field="R")
    if not np.allclose(R, R.T, rtol=1e-12, atol=1e-12):
        raise ArgumentError("R must be symmetric", field="R")
    try:
        linalg.cholesky(R, lower=True)
    except linalg.LinAlgError as e:
        raise ArgumentError("R must be positive definite", field="R") from e
    return R


def _quad(R: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Row-wise quadratic forms w_i^T R w_i"""
    return np.einsum("ij,jk,ik->i", W, R, W)


def j_functional(f: GridFunction, R: np.ndarray, m: int) -> float:
    """J_m(f) via the weight form (1/(m-1)!) sum_i r_{N,m-1}(i) f(i)^T R f(i)"""
    if m < 1:
        raise ArgumentError(f"multiplicity m must be positive, got {m}", field="m")
    R = _check_spd(R, f.n)
    w = np.array([float(weight(f.N, m - 1, i)) for i in range(f.N)])
    return float(w @ _quad(R, f.values[: f.N]) / factorial(m - 1))


def j_functional_nested(f: GridFunction, R: np.ndarray, m: int) -> float:
    """J_m(f) by literal enumeration of the nested index chains"""
    if m < 1:
        raise ArgumentError(f"multiplicity m must be positive, got {m}", field="m")
    R = _check_spd(R, f.n)
    q = _quad(R, f.values[: f.N])

    def nested(upper: int, depth: int) -> float:
        if depth == 1:
            return float(sum(q[i] for i in range(upper + 1)))
        return sum(nested(i, depth - 1) for i in range(upper + 1))

    return nested(f.N - 1, m)


def phi_vector(
    f: GridFunction,
    nu1: int,
    normalization: Normalization = Normalization.SIGN_AT_MINUS_ONE,
) -> np.ndarray:
    """(nu1+1, n) array of phi_j = sum_{i<N} p_{1j}(i) f(i)"""
    basis = build_basis(f.N, 1, nu1, normalization)
    P = np.array([[float(p(i)) for i in range(f.N)] for p in basis.polys])
    return P @ f.values[: f.N]


def phi_tilde(
    f: GridFunction,
    nu1: int,
    normalization: Normalization = Normalization.SIGN_AT_MINUS_ONE,
) -> np.ndarray:
    """(nu1+2, n) array col{f(N), f(0), phi_0, ..., phi_{nu1-1}}"""
    if f.values.shape[0] < f.N + 1:
        raise ArgumentError(f"need samples through index N={f.N}", field="values")
    head = np.vstack([f.values[f.N], f.values[0]])
    if nu1 == 0:
        return head
    return np.vstack([head, phi_vector(f, nu1 - 1, normalization)])


def lower_bound_function(
    f: GridFunction,
    R: np.ndarray,
    m: int,
    nu1: int,
    num: int,
    normalization: Normalization = Normalization.SIGN_AT_MINUS_ONE,
) -> float:
    """Projection lower bound on J_m(f) through polynomials of degree <= nu_m"""
    R = _check_spd(R, f.n)
    xi = xi_matrix(f.N, m, nu1, num, normalization)
    W = xi.as_array() @ phi_vector(f, nu1, normalization)
    return float(xi.chi_array() @ _quad(R, W) / factorial(m - 1))


def lower_bound_difference(
    f: GridFunction,
    R: np.ndarray,
    m: int,
    nu1: int,
    num: int,
    normalization: Normalization = Normalization.SIGN_AT_MINUS_ONE,
) -> float:
    """Projection lower bound on J_m(rho), rho(i) = f(i+1) - f(i)"""
    R = _check_spd(R, f.n)
    zeta = zeta_matrix(f.N, m, nu1, num, normalization)
    W = zeta.as_array() @ phi_tilde(f, nu1, normalization)
    return float(zeta.chi_array() @ _quad(R, W) / factorial(m - 1))


# Closed-form special cases


def nested_sum(f: GridFunction, depth: int, upto: Optional[int] = None) -> np.ndarray:
    """sum_{i_1<upto} sum_{i_2<=i_1} ... x(i_depth); upto defaults to N"""
    upto = f.N if upto is None else upto
    v = f.values[:upto]
    for _ in range(depth - 1):
        v = np.cumsum(v, axis=0)
    return v.sum(axis=0)


def jensen_bound(f: GridFunction, R: np.ndarray) -> float:
    R = _check_spd(R, f.n)
    omega = nested_sum(f, 1)
    return float(omega @ R @ omega) / f.N


def wirtinger_bound(f: GridFunction, R: np.ndarray) -> float:
    R = _check_spd(R, f.n)
    N = f.N
    if N < 2:
        raise ArgumentError("Wirtinger bound needs N > 1", field="N")
    o10 = nested_sum(f, 1)
    o11 = o10 - 2.0 / (N + 1) * nested_sum(f, 2)
    return (float(o10 @ R @ o10) + 3.0 * (N + 1) / (N - 1) * float(o11 @ R @ o11)) / N


def three_term_bound(f: GridFunction, R: np.ndarray) -> float:
    """Single-sum bound through quadratic polynomials"""
    R = _check_spd(R, f.n)
    N = f.N
    if N < 3:
        raise ArgumentError("three-term bound needs N > 2", field="N")
    s1, s2, s3 = (nested_sum(f, d) for d in (1, 2, 3))
    o11 = s1 - 2.0 / (N + 1) * s2
    o12 = s1 - 6.0 / (N + 1) * s2 + 12.0 / ((N + 1) * (N + 2)) * s3
    total = (
        float(s1 @ R @ s1)
        + 3.0 * (N + 1) / (N - 1) * float(o11 @ R @ o11)
        + 5.0 * (N + 1) * (N + 2) / ((N - 1) * (N - 2)) * float(o12 @ R @ o12)
    )
    return total / N


def double_sum_bound(f: GridFunction, R: np.ndarray, nu2: int) -> float:
    """Bound on J_2 through degree nu2 in {0, 1}"""
    R = _check_spd(R, f.n)
    N = f.N
    o20 = nested_sum(f, 2)
    total = float(o20 @ R @ o20)
    if nu2 == 1:
        if N < 2:
            raise ArgumentError("degree-one double-sum bound needs N > 1", field="N")
        o21 = o20 - 3.0 / (N + 2) * nested_sum(f, 3)
        total += 8.0 * (N + 2) / (N - 1) * float(o21 @ R @ o21)
    elif nu2 != 0:
        raise ArgumentError(f"nu2 must be 0 or 1, got {nu2}", field="nu2", value=nu2)
    return 2.0 * total / (N * (N + 1))


def jensen_difference_bound(f: GridFunction, R: np.ndarray) -> float:
    R = _check_spd(R, f.n)
    d = f.values[f.N] - f.values[0]
    return float(d @ R @ d) / f.N


def wirtinger_difference_bound(f: GridFunction, R: np.ndarray) -> float:
    R = _check_spd(R, f.n)
    N = f.N
    if N < 2:
        raise ArgumentError("Wirtinger bound needs N > 1", field="N")
    o10 = f.values[N] - f.values[0]
    o11 = f.values[N] + f.values[0] - 2.0 / (N + 1) * f.values[: N + 1].sum(axis=0)
    return (float(o10 @ R @ o10) + 3.0 * (N + 1) / (N - 1) * float(o11 @ R @ o11)) / N


def chain_count(tau: int, k: int) -> int:
    """Number of index chains tau-1 >= i_1 >= ... >= i_k >= 0"""
    return comb(tau - 1 + k, k)
