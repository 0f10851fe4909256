"""
Shared fixtures for the delaylmi test suite.
"""

import logging

import numpy as np
import pytest

from delaylmi.core.polys import clear_basis_cache
from delaylmi.models import SystemModel
from delaylmi.systems import SystemLibrary


@pytest.fixture(autouse=True)
def reset_package_logger():
    """The CLI installs its own handler; undo it between tests."""
    yield
    logger = logging.getLogger("delaylmi")
    logger.handlers.clear()
    logger.propagate = True
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def fresh_basis_cache():
    clear_basis_cache()
    yield
    clear_basis_cache()


@pytest.fixture
def library():
    return SystemLibrary()


@pytest.fixture
def ex1(library) -> SystemModel:
    return library.get("ex1").to_model()


@pytest.fixture
def ex3(library) -> SystemModel:
    return library.get("ex3").to_model()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    B = rng.standard_normal((n, n))
    return B @ B.T + 0.5 * np.eye(n)
