"""
Numerical core: exact polynomials, inequalities, LMI assembly, solver, analyses.
"""

from .coeffs import LambdaRow, XiMatrix, ZetaMatrix, lambda_row, xi_matrix, zeta_matrix
from .ineq import (
    GridFunction,
    j_functional,
    j_functional_nested,
    lower_bound_difference,
    lower_bound_function,
)
from .lmi import BlockLmi, StructuralMatrices, assemble, delta_v_bound_check, structural
from .polys import OrthoBasis, Poly, build_basis, inner_product, weight
from .sdp import solve_feasibility, symmetric_eigen, verify_certificate
from .stability import (
    certify,
    hierarchy_table,
    lifting_oracle,
    max_delay,
    nodv,
    nodv_lifting,
)

__all__ = [
    "Poly",
    "OrthoBasis",
    "weight",
    "inner_product",
    "build_basis",
    "XiMatrix",
    "ZetaMatrix",
    "LambdaRow",
    "xi_matrix",
    "zeta_matrix",
    "lambda_row",
    "GridFunction",
    "j_functional",
    "j_functional_nested",
    "lower_bound_function",
    "lower_bound_difference",
    "StructuralMatrices",
    "BlockLmi",
    "structural",
    "assemble",
    "delta_v_bound_check",
    "symmetric_eigen",
    "solve_feasibility",
    "verify_certificate",
    "certify",
    "max_delay",
    "lifting_oracle",
    "hierarchy_table",
    "nodv",
    "nodv_lifting",
]
