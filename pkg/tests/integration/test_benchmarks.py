"""
End-to-end decisions on the bundled benchmark systems.
"""

import pytest

from delaylmi.core.stability import (
    certify,
    hierarchy_table,
    lifting_oracle,
    lifting_scan,
    max_delay,
    nodv,
    nodv_lifting,
    soundness_violations,
)
from delaylmi.models import LmiSpec, SolverOptions

from .conftest import (
    FIRST_BENCHMARK,
    SECOND_BENCHMARK,
    SECOND_BENCHMARK_LEFT_EDGE,
    THIRD_BENCHMARK,
    UNSTABLE_DELAYS,
    benchmark_cases,
)

pytestmark = pytest.mark.slow


def _decide(system, tau, spec):
    return certify(system.with_tau(tau), spec).feasible


def _boundary_reproduced(system, spec, tau_max):
    """Feasible at tau_max, not at tau_max + 1.

    A borderline decision at tau_max (0 < margin <= feas_tol) still counts
    when the margin changes sign between tau_max and tau_max + 1.
    """
    at = certify(system.with_tau(tau_max), spec)
    after = certify(system.with_tau(tau_max + 1), spec)
    if after.feasible:
        return False
    if at.feasible:
        return True
    return at.borderline and at.margin > 0 >= after.margin


def _assert_ordered(table):
    """Positive-margin boundaries never decrease moving right or down"""
    bounds = {key: rng.tau_max_positive_margin for key, rng in table.cells.items()}
    for (ell, nu1), here in bounds.items():
        for key in ((ell, nu1 + 1), (ell + 1, nu1)):
            if key in bounds and here is not None:
                assert bounds[key] is not None and bounds[key] >= here, (key, bounds)


def _cells():
    cells = [("ex1", m, nu1) for m, nu1 in FIRST_BENCHMARK]
    cells += [("ex2", m, nu1) for m, nu1 in SECOND_BENCHMARK]
    cells += [("ex3", 1, nu1) for nu1 in THIRD_BENCHMARK]
    cells += [("ex3", 2, nu1) for nu1 in (1, 2, 3)]
    return cells


class TestEx1:
    """Two-state system, exact stable set [0, 58]"""

    @pytest.mark.parametrize("m,nu1,tau_max,count", benchmark_cases(FIRST_BENCHMARK))
    def test_boundary(self, systems, m, nu1, tau_max, count):
        assert _boundary_reproduced(systems["ex1"], LmiSpec.default(m, nu1), tau_max)
        assert nodv(2, nu1, m) == count

    def test_scan_near_boundary(self, systems):
        rng = max_delay(systems["ex1"], LmiSpec.default(2, 2), range(50, 66), jobs=4)
        assert rng.tau_max_feasible == 58
        assert rng.feasible_taus == list(range(50, 59))
        assert soundness_violations(systems["ex1"], rng) == []

    def test_hierarchy_is_ordered(self, systems):
        table = hierarchy_table(systems["ex1"], 2, 2, range(40, 61), jobs=4)
        assert table.violations == []
        assert table.entries == {
            (m, nu1): tau for (m, nu1), (tau, _) in FIRST_BENCHMARK.items()
        }

    def test_early_decision_matches(self, systems):
        opts = SolverOptions(early_decision=True)
        spec = LmiSpec.default(1, 1)
        assert certify(systems["ex1"].with_tau(57), spec, opts).feasible
        assert not certify(systems["ex1"].with_tau(58), spec, opts).feasible


class TestEx2:
    """Two-state system whose delay-free part is unstable"""

    @pytest.mark.parametrize("m,nu1,tau_max,count", benchmark_cases(SECOND_BENCHMARK))
    def test_boundary(self, systems, m, nu1, tau_max, count):
        assert _boundary_reproduced(systems["ex2"], LmiSpec.default(m, nu1), tau_max)
        assert nodv(2, nu1, m) == count

    @pytest.mark.parametrize("m,nu1", list(SECOND_BENCHMARK))
    def test_left_edge_is_feasible(self, systems, m, nu1):
        assert _decide(systems["ex2"], SECOND_BENCHMARK_LEFT_EDGE, LmiSpec.default(m, nu1))

    def test_below_left_edge(self, systems):
        spec = LmiSpec.default(1, 2)
        assert not _decide(systems["ex2"], SECOND_BENCHMARK_LEFT_EDGE - 1, spec)
        assert not lifting_oracle(systems["ex2"].with_tau(SECOND_BENCHMARK_LEFT_EDGE - 1))

    def test_positive_margin_past_certified_boundary(self, systems):
        """At tau = 169 the quartic LMI keeps a positive margin below feas_tol"""
        rng = max_delay(systems["ex2"], LmiSpec.default(1, 4), range(166, 172), jobs=3)
        assert rng.tau_max_feasible == 168
        assert rng.tau_max_positive_margin == 169
        assert rng.to_dict()["tau_max_positive_margin"] == 169

    def test_hierarchy_is_ordered(self, systems):
        table = hierarchy_table(systems["ex2"], 2, 2, range(140, 171), jobs=4)
        _assert_ordered(table)
        for key in [(1, 1), (1, 2), (2, 2)]:
            assert table.entries[key] == SECOND_BENCHMARK[key][0]

    def test_lifting(self, systems):
        ex2 = systems["ex2"]
        scan = lifting_scan(ex2.A, ex2.A_d, range(0, 201), jobs=4)
        assert scan.render() == "[12, 169]"
        assert nodv_lifting(2, scan.stable[-1]) == 57970


class TestEx3:
    """Three-state system, exact stable set [0, 56]"""

    @pytest.mark.parametrize("nu1", sorted(THIRD_BENCHMARK))
    def test_boundary(self, systems, nu1):
        tau_max, count = THIRD_BENCHMARK[nu1]
        assert _boundary_reproduced(systems["ex3"], LmiSpec.default(1, nu1), tau_max)
        assert nodv(3, nu1, 1) == count

    @pytest.mark.parametrize("nu1", [1, 2, 3])
    def test_double_summation_adds_nothing(self, systems, nu1):
        tau_max, _ = THIRD_BENCHMARK[nu1]
        assert _boundary_reproduced(systems["ex3"], LmiSpec.default(2, nu1), tau_max)

    def test_hierarchy_is_ordered(self, systems):
        table = hierarchy_table(systems["ex3"], 2, 3, range(30, 58), jobs=4)
        _assert_ordered(table)
        for nu1 in range(4):
            assert table.entries[(1, nu1)] == THIRD_BENCHMARK[nu1][0]

    def test_lifting(self, systems):
        ex3 = systems["ex3"]
        scan = lifting_scan(ex3.A, ex3.A_d, range(0, 71), jobs=4)
        assert scan.render() == "[0, 56]"
        assert nodv_lifting(3, 56) == 14706


class TestSoundness:
    """No benchmark cell certifies a delay the lifted system finds unstable"""

    @pytest.mark.parametrize("name,m,nu1", _cells())
    def test_unstable_delays_are_never_certified(self, systems, name, m, nu1):
        rng = max_delay(systems[name], LmiSpec.default(m, nu1), UNSTABLE_DELAYS[name], jobs=4)
        assert soundness_violations(systems[name], rng) == []
        assert rng.feasible_taus == []
