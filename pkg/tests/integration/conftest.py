"""
Integration test configuration and shared fixtures.

Benchmark expectations: for each bundled system, the largest delay each
LMI certifies and the number of decision variables it uses.
"""

from typing import Dict, List, Tuple

import pytest

from delaylmi.models import SystemModel
from delaylmi.systems import SystemLibrary

# (m, nu1) -> (tau_max, NoDV)
FIRST_BENCHMARK: Dict[Tuple[int, int], Tuple[int, int]] = {
    (1, 0): (42, 9),
    (1, 1): (57, 16),
    (2, 1): (57, 19),
    (1, 2): (58, 27),
    (2, 2): (58, 30),
}

SECOND_BENCHMARK: Dict[Tuple[int, int], Tuple[int, int]] = {
    (1, 1): (151, 16),
    (1, 2): (168, 27),
    (2, 2): (168, 30),
    (1, 4): (169, 61),
    (2, 4): (169, 64),
}

# nu1 -> (tau_max, NoDV) for m = 1
THIRD_BENCHMARK: Dict[int, Tuple[int, int]] = {
    0: (34, 18),
    1: (50, 33),
    2: (52, 57),
    3: (52, 90),
    4: (55, 132),
    5: (56, 183),
}

SECOND_BENCHMARK_LEFT_EDGE = 12

# delays in each default scan where the lifted system is not stable
UNSTABLE_DELAYS: Dict[str, List[int]] = {
    "ex1": list(range(59, 71)),
    "ex2": list(range(1, 12)) + list(range(170, 201)),
    "ex3": list(range(57, 71)),
}


def benchmark_cases(
    table: Dict[Tuple[int, int], Tuple[int, int]]
) -> List[Tuple[int, int, int, int]]:
    return [(m, nu1, tau, count) for (m, nu1), (tau, count) in table.items()]


@pytest.fixture(scope="session")
def systems() -> Dict[str, SystemModel]:
    library = SystemLibrary()
    return {name: library.get(name).to_model() for name in library.available()}
