"""Shared fixtures: the quadrangle classes and their closed lattices"""

import logging

import pytest

from src.core.exploiters import intersection, union
from src.core.lattice import LatticeMode, close_under_exploiters
from src.storage.fixtures import builtin_quadrangle, quadrangle_classes


@pytest.fixture
def quadrangle():
    return quadrangle_classes()


@pytest.fixture
def classes(quadrangle):
    """Quadrangle classes by name"""
    return {c.name: c for c in quadrangle}


@pytest.fixture
def ranking(quadrangle):
    return {c.name: i for i, c in enumerate(quadrangle)}


@pytest.fixture
def join(ranking):
    return lambda *operands: union(list(operands), ranking)


@pytest.fixture
def meet(ranking):
    return lambda *operands: intersection(list(operands), ranking)


@pytest.fixture(scope="session")
def named_lattice():
    return close_under_exploiters(quadrangle_classes(), LatticeMode.NAMED)


@pytest.fixture(scope="session")
def strict_lattice():
    return close_under_exploiters(quadrangle_classes(), LatticeMode.STRICT)


@pytest.fixture
def quadrangle_doc():
    return builtin_quadrangle()


@pytest.fixture(autouse=True)
def restore_root_handlers():
    """The CLI reconfigures root logging; put the handlers back after each test"""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
