"""
Tests for the summation functionals, their lower bounds and the property suite.
"""

import numpy as np
import pytest

from delaylmi.core.ineq import (
    GridFunction,
    chain_count,
    double_sum_bound,
    j_functional,
    j_functional_nested,
    jensen_bound,
    jensen_difference_bound,
    lower_bound_difference,
    lower_bound_function,
    nested_sum,
    phi_tilde,
    phi_vector,
    three_term_bound,
    wirtinger_bound,
    wirtinger_difference_bound,
)
from delaylmi.core.polys import build_basis
from delaylmi.core.property_suite import run_property_suite
from delaylmi.errors import ArgumentError
from delaylmi.models import Normalization

from .conftest import random_spd


def _chains(top, k):
    """Count top >= i_1 >= ... >= i_k >= 0 by enumeration"""
    if k == 0:
        return 1
    return sum(_chains(i, k - 1) for i in range(top + 1))


class TestGridFunction:
    """Sample containers"""

    def test_one_dimensional_input(self):
        f = GridFunction(np.arange(5.0), 4)
        assert f.n == 1
        assert f.values.shape == (5, 1)

    def test_differences(self):
        f = GridFunction(np.array([[0.0], [1.0], [4.0], [9.0]]), 3)
        np.testing.assert_array_equal(f.differences().values[:, 0], [1.0, 3.0, 5.0])

    def test_differences_need_sample_at_horizon(self):
        with pytest.raises(ArgumentError, match="through index N"):
            GridFunction(np.zeros((3, 1)), 3).differences()

    def test_too_few_samples(self):
        with pytest.raises(ArgumentError, match="at least N"):
            GridFunction(np.zeros((2, 1)), 3)


class TestFunctional:
    """J_m by weight form and by nested enumeration"""

    def test_single_sum(self, rng):
        values = rng.standard_normal((6, 2))
        R = random_spd(rng, 2)
        f = GridFunction(values, 6)
        expected = sum(v @ R @ v for v in values)
        assert j_functional(f, R, 1) == pytest.approx(expected, rel=1e-12)

    def test_weight_form_matches_nested(self, rng):
        for _ in range(100):
            N = int(rng.integers(1, 11))
            m = int(rng.integers(1, 5))
            n = int(rng.integers(1, 4))
            f = GridFunction(rng.standard_normal((N + 1, n)), N)
            R = random_spd(rng, n)
            assert j_functional(f, R, m) == pytest.approx(
                j_functional_nested(f, R, m), rel=1e-12
            )

    def test_rejects_indefinite_weight(self):
        f = GridFunction(np.ones((3, 2)), 2)
        with pytest.raises(ArgumentError, match="positive definite"):
            j_functional(f, np.diag([1.0, -1.0]), 1)
        with pytest.raises(ArgumentError, match="symmetric"):
            j_functional(f, np.array([[1.0, 0.5], [0.0, 1.0]]), 1)
        with pytest.raises(ArgumentError, match="shape"):
            j_functional(f, np.eye(3), 1)

    def test_nested_sum(self, rng):
        f = GridFunction(rng.standard_normal((5, 2)), 5)
        weights = np.arange(5, 0, -1.0)
        np.testing.assert_allclose(nested_sum(f, 2), weights @ f.values, rtol=1e-12)

    def test_chain_count(self):
        assert chain_count(3, 1) == 3
        assert chain_count(3, 2) == 6
        assert chain_count(1, 4) == 1

    def test_chain_count_matches_enumeration(self):
        for tau in range(1, 21):
            for k in range(1, 5):
                assert chain_count(tau, k) == _chains(tau - 1, k), (tau, k)


class TestProjection:
    """Projection coordinates"""

    def test_phi_vector(self, rng):
        f = GridFunction(rng.standard_normal((7, 2)), 7)
        phi = phi_vector(f, 2)
        assert phi.shape == (3, 2)
        np.testing.assert_allclose(phi[0], f.values.sum(axis=0), rtol=1e-12)

    def test_phi_tilde_layout(self, rng):
        f = GridFunction(rng.standard_normal((7, 1)), 6)
        out = phi_tilde(f, 3)
        assert out.shape == (5, 1)
        assert out[0, 0] == f.values[6, 0]
        assert out[1, 0] == f.values[0, 0]
        np.testing.assert_allclose(out[2:], phi_vector(f, 2), rtol=1e-12)
        assert phi_tilde(f, 0).shape == (2, 1)


class TestLowerBounds:
    """Validity, tightness and closed-form special cases"""

    def test_function_bound_is_valid(self, rng):
        for _ in range(50):
            N = int(rng.integers(1, 10))
            m = int(rng.integers(1, min(3, N) + 1))
            nu1 = int(rng.integers(m - 1, N))
            num = int(rng.integers(0, nu1 - m + 2))
            f = GridFunction(rng.standard_normal((N + 1, 2)), N)
            R = random_spd(rng, 2)
            exact = j_functional_nested(f, R, m)
            assert lower_bound_function(f, R, m, nu1, num) <= exact + 1e-9 * max(
                1.0, exact
            )

    def test_difference_bound_is_valid(self, rng):
        for _ in range(50):
            N = int(rng.integers(1, 10))
            m = int(rng.integers(1, min(3, N) + 1))
            nu1 = int(rng.integers(m - 1, N))
            num = int(rng.integers(0, nu1 - m + 2))
            f = GridFunction(rng.standard_normal((N + 1, 2)), N)
            R = random_spd(rng, 2)
            exact = j_functional_nested(f.differences(), R, m)
            assert lower_bound_difference(f, R, m, nu1, num) <= exact + 1e-9 * max(
                1.0, exact
            )

    @pytest.mark.parametrize("bound", [lower_bound_function, lower_bound_difference])
    def test_normalization_invariance(self, rng, bound):
        """Rescaling the basis leaves both bounds unchanged"""
        for _ in range(40):
            N = int(rng.integers(2, 11))
            m = int(rng.integers(1, min(3, N) + 1))
            nu1 = int(rng.integers(m - 1, min(N, 7)))
            num = int(rng.integers(0, nu1 - m + 2))
            f = GridFunction(rng.standard_normal((N + 1, 2)), N)
            R = random_spd(rng, 2)
            monic = bound(f, R, m, nu1, num, Normalization.MONIC)
            signed = bound(f, R, m, nu1, num, Normalization.SIGN_AT_MINUS_ONE)
            assert monic == pytest.approx(signed, rel=1e-11, abs=1e-12)

    def test_equality_at_matched_degree(self, rng):
        N, m, num = 8, 2, 2
        basis = build_basis(N, m, num)
        grid = np.array([[float(p(i)) for p in basis.polys] for i in range(N)])
        f = GridFunction(grid @ rng.standard_normal((num + 1, 3)), N)
        R = random_spd(rng, 3)
        assert lower_bound_function(f, R, m, 4, num) == pytest.approx(
            j_functional(f, R, m), rel=1e-9
        )

    def test_higher_degree_tightens(self, rng):
        f = GridFunction(rng.standard_normal((10, 2)), 9)
        R = random_spd(rng, 2)
        bounds = [lower_bound_function(f, R, 1, nu, nu) for nu in range(5)]
        assert all(a <= b + 1e-12 for a, b in zip(bounds, bounds[1:]))

    def test_closed_forms(self, rng):
        f = GridFunction(rng.standard_normal((8, 2)), 7)
        R = random_spd(rng, 2)
        pairs = [
            (jensen_bound(f, R), lower_bound_function(f, R, 1, 0, 0)),
            (wirtinger_bound(f, R), lower_bound_function(f, R, 1, 1, 1)),
            (three_term_bound(f, R), lower_bound_function(f, R, 1, 2, 2)),
            (double_sum_bound(f, R, 0), lower_bound_function(f, R, 2, 1, 0)),
            (double_sum_bound(f, R, 1), lower_bound_function(f, R, 2, 2, 1)),
            (jensen_difference_bound(f, R), lower_bound_difference(f, R, 1, 0, 0)),
            (wirtinger_difference_bound(f, R), lower_bound_difference(f, R, 1, 1, 1)),
        ]
        for closed, general in pairs:
            assert closed == pytest.approx(general, rel=1e-12)

    def test_closed_form_horizon_limits(self):
        f = GridFunction(np.ones((3, 1)), 2)
        R = np.eye(1)
        with pytest.raises(ArgumentError, match="N > 2"):
            three_term_bound(f, R)
        g = GridFunction(np.ones((2, 1)), 1)
        with pytest.raises(ArgumentError, match="N > 1"):
            wirtinger_bound(g, R)
        with pytest.raises(ArgumentError, match="nu2 must be 0 or 1"):
            double_sum_bound(f, R, 2)

    def test_order_precondition(self, rng):
        f = GridFunction(rng.standard_normal((6, 1)), 5)
        with pytest.raises(ArgumentError):
            lower_bound_function(f, np.eye(1), 2, 1, 1)


class TestPropertySuite:
    """Seeded randomized checks"""

    def test_passes(self):
        report = run_property_suite(trials=80, seed=7)
        assert report.all_passed, {
            name: tally.failures for name, tally in report.checks.items() if tally.failed
        }
        assert report.checks["function_validity"].passed == 80
        assert report.checks["specialization_jensen"].passed == 80

    def test_deterministic(self):
        first = run_property_suite(trials=20, seed=11)
        second = run_property_suite(trials=20, seed=11)
        assert first.samples == second.samples
        assert run_property_suite(trials=20, seed=12).samples != first.samples

    def test_tiny_horizon(self):
        report = run_property_suite(trials=60, seed=0, nmax=3)
        assert report.all_passed
        assert all(sample[0] <= 3 for sample in report.samples)
