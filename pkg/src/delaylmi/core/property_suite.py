"""
Seeded randomized checks of the summation inequalities.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from ..models.core import Normalization
from .ineq import (
    GridFunction,
    double_sum_bound,
    j_functional,
    j_functional_nested,
    jensen_bound,
    jensen_difference_bound,
    lower_bound_difference,
    lower_bound_function,
    three_term_bound,
    wirtinger_bound,
    wirtinger_difference_bound,
)
from .polys import build_basis

logger = logging.getLogger(__name__)

VALIDITY_TOL = 1e-9
EQUALITY_TOL = 1e-9
SPECIALIZATION_TOL = 1e-12


@dataclass
class CheckTally:
    passed: int = 0
    failed: int = 0
    failures: List[str] = field(default_factory=list)

    def record(self, ok: bool, detail: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < 10:
                self.failures.append(detail)


@dataclass
class PropertySuiteReport:
    trials: int
    seed: int
    checks: Dict[str, CheckTally] = field(default_factory=dict)
    samples: List[Tuple[int, int, int, int, int]] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(t.failed == 0 for t in self.checks.values())

    def tally(self, name: str) -> CheckTally:
        return self.checks.setdefault(name, CheckTally())


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    B = rng.standard_normal((n, n))
    return B @ B.T + 0.1 * np.eye(n)


def _specializations(
    f: GridFunction, R: np.ndarray
) -> List[Tuple[str, Callable[[], float], Callable[[], float]]]:
    """(label, closed form, general bound) pairs admissible for f.N"""
    N = f.N
    cases = [
        ("jensen", lambda: jensen_bound(f, R), lambda: lower_bound_function(f, R, 1, 0, 0)),
        (
            "jensen_difference",
            lambda: jensen_difference_bound(f, R),
            lambda: lower_bound_difference(f, R, 1, 0, 0),
        ),
    ]
    if N > 1:
        cases += [
            (
                "wirtinger",
                lambda: wirtinger_bound(f, R),
                lambda: lower_bound_function(f, R, 1, 1, 1),
            ),
            (
                "wirtinger_difference",
                lambda: wirtinger_difference_bound(f, R),
                lambda: lower_bound_difference(f, R, 1, 1, 1),
            ),
            (
                "double_sum_0",
                lambda: double_sum_bound(f, R, 0),
                lambda: lower_bound_function(f, R, 2, 1, 0),
            ),
        ]
    if N > 2:
        cases += [
            (
                "three_term",
                lambda: three_term_bound(f, R),
                lambda: lower_bound_function(f, R, 1, 2, 2),
            ),
            (
                "double_sum_1",
                lambda: double_sum_bound(f, R, 1),
                lambda: lower_bound_function(f, R, 2, 2, 1),
            ),
        ]
    return cases


def run_property_suite(
    trials: int = 1000, seed: int = 0, nmax: int = 12, mmax: int = 3
) -> PropertySuiteReport:
    """Check validity, matched-degree equality and closed-form specializations"""
    rng = np.random.default_rng(seed)
    report = PropertySuiteReport(trials, seed)
    for trial in range(trials):
        N = int(rng.integers(1, nmax + 1))
        m = int(rng.integers(1, min(mmax, N) + 1))
        nu1 = int(rng.integers(m - 1, N))
        num = int(rng.integers(0, nu1 - m + 2))
        n = int(rng.integers(1, 4))
        report.samples.append((N, m, nu1, num, n))
        label = f"trial {trial}: N={N} m={m} nu1={nu1} num={num} n={n}"

        values = rng.standard_normal((N + 1, n))
        R = _random_spd(rng, n)
        f = GridFunction(values, N)

        j_nested = j_functional_nested(f, R, m)
        j_weighted = j_functional(f, R, m)
        report.tally("weight_form").record(
            _close(j_nested, j_weighted, SPECIALIZATION_TOL), label
        )

        bound = lower_bound_function(f, R, m, nu1, num)
        report.tally("function_validity").record(
            j_nested >= bound - VALIDITY_TOL * max(1.0, j_nested), label
        )

        rho = f.differences()
        j_rho = j_functional_nested(rho, R, m)
        bound_rho = lower_bound_difference(f, R, m, nu1, num)
        report.tally("difference_validity").record(
            j_rho >= bound_rho - VALIDITY_TOL * max(1.0, j_rho), label
        )

        # f inside the span of p_{m0..m,num}: the bound is attained
        basis = build_basis(N, m, num, Normalization.SIGN_AT_MINUS_ONE)
        coeffs = rng.standard_normal((num + 1, n))
        grid = np.array([[float(p(i)) for p in basis.polys] for i in range(N)])
        g = GridFunction(grid @ coeffs, N)
        exact = j_functional(g, R, m)
        report.tally("matched_degree_equality").record(
            _close(exact, lower_bound_function(g, R, m, nu1, num), EQUALITY_TOL), label
        )

        for name, closed, general in _specializations(f, R):
            report.tally(f"specialization_{name}").record(
                _close(closed(), general(), SPECIALIZATION_TOL), label
            )

    for name, tally in report.checks.items():
        logger.info(f"{name}: {tally.passed} passed, {tally.failed} failed")
    return report
