"""
Expansion coefficients of weighted polynomials in the m=1 basis.

Every row here is the exact expansion of a polynomial of known degree in
the discrete Chebyshev basis p_{10}, p_{11}, ... on {0..N-1}:

- Xi_m rows expand r_{N,m-1}(i) p_{mj}(i),
- Z_m rows expand the summation-by-parts residue of <rho, p_{mj}>_m and
  carry the two boundary constants,
- Lambda rows expand the shifted polynomial p_{1l}(i-1).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from ..errors import ArgumentError
from ..models.core import Normalization
from .polys import build_basis, expand_in_basis, weight_poly

logger = logging.getLogger(__name__)


def _check_order(N: int, m: int, nu1: int, num: int) -> None:
    if m < 1:
        raise ArgumentError(f"multiplicity m must be positive, got {m}", field="m", value=m)
    if num < 0:
        raise ArgumentError(f"nu_m must be nonnegative, got {num}", field="nu_m", value=num)
    if not num + m - 1 <= nu1 < N:
        raise ArgumentError(
            f"need nu_m + m - 1 <= nu_1 < N, got nu_m={num}, m={m}, nu_1={nu1}, N={N}",
            field="nu_1",
            value=nu1,
        )


@dataclass(frozen=True)
class XiMatrix:
    """(nu_m+1) x (nu_1+1) exact matrix; row j expands r_{N,m-1} p_{mj}"""

    N: int
    m: int
    nu1: int
    num: int
    entries: Tuple[Tuple[Fraction, ...], ...]
    chi: Tuple[Fraction, ...]

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries])

    def chi_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.chi])


@dataclass(frozen=True)
class ZetaMatrix:
    """(nu_m+1) x (nu_1+2) exact matrix; row j = [c_{m,j,1}, c_{m,j,0}, zeta_{j,0..nu_1-1}]"""

    N: int
    m: int
    nu1: int
    num: int
    entries: Tuple[Tuple[Fraction, ...], ...]
    chi: Tuple[Fraction, ...]

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries])

    def chi_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.chi])


@dataclass(frozen=True)
class LambdaRow:
    """Shift coefficients: p_{1l}(i-1) = sum_s lambdas[s] p_{1s}(i)"""

    l: int  # noqa: E741
    c1: Fraction
    c0: Fraction
    lambdas: Tuple[Fraction, ...]

    def as_list(self) -> List[Fraction]:
        return [self.c1, self.c0, *self.lambdas]


def xi_matrix(
    N: int,
    m: int,
    nu1: int,
    num: int,
    normalization: Normalization = Normalization.SIGN_AT_MINUS_ONE,
) -> XiMatrix:
    _check_order(N, m, nu1, num)
    basis1 = build_basis(N, 1, nu1, normalization)
    basis_m = build_basis(N, m, num, normalization)
    r = weight_poly(N, m - 1)
    rows = []
    for j in range(num + 1):
        rows.append(tuple(expand_in_basis(r * basis_m.polys[j], basis1, nu1 + 1)))
    return XiMatrix(
        N, m, nu1, num, tuple(rows), tuple(basis_m.chi(j) for j in range(num + 1))
    )


def zeta_matrix(
    N: int,
    m: int,
    nu1: int,
    num: int,
    normalization: Normalization = Normalization.SIGN_AT_MINUS_ONE,
) -> ZetaMatrix:
    _check_order(N, m, nu1, num)
    basis_m = build_basis(N, m, num, normalization)
    basis1 = build_basis(N, 1, max(nu1 - 1, 0), normalization)
    r = weight_poly(N, m - 1)
    rows = []
    for j in range(num + 1):
        q = r * basis_m.polys[j]
        c1 = q(N - 1)
        c0 = -q(-1)
        q_tilde = q.shifted(-1) - q
        zetas = expand_in_basis(q_tilde, basis1, nu1)[:nu1] if nu1 > 0 else []
        rows.append((c1, c0, *zetas))
    logger.debug(f"Built Z_{m} for N={N}, nu_1={nu1}, nu_m={num}")
    return ZetaMatrix(
        N, m, nu1, num, tuple(rows), tuple(basis_m.chi(j) for j in range(num + 1))
    )


def lambda_row(N: int, l: int, nu1: int) -> LambdaRow:  # noqa: E741
    """Row l of the unscaled shift matrix, SignAtMinusOne normalization"""
    if not 0 <= l <= nu1 <= N - 1:
        raise ArgumentError(
            f"need 0 <= l <= nu_1 <= N-1, got l={l}, nu_1={nu1}, N={N}",
            field="l",
            value=l,
        )
    basis = build_basis(N, 1, nu1, Normalization.SIGN_AT_MINUS_ONE)
    p = basis.polys[l]
    coefficients = expand_in_basis(p.shifted(-1), basis, nu1 + 1)
    # lambda_{nu_1,nu_1} falls outside the projection coordinates
    return LambdaRow(l, p(N - 1), -p(-1), tuple(coefficients[:nu1]))
