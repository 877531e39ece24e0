"""
Shared fixtures for the crnmix test suite
"""

import pytest

from crnmix.library import load_builtin
from crnmix.network import parse_network
from crnmix.simulation import SimulationConfig


@pytest.fixture
def open_binary():
    """A -> B -> 2C -> A with every in-flow and out-flow, unit rates."""
    return load_builtin("open_binary")


@pytest.fixture
def double_full():
    return load_builtin("double_full")


@pytest.fixture
def enzyme_outflows():
    return load_builtin("enzyme_outflows")


@pytest.fixture
def tier_example():
    return load_builtin("tier_example")


@pytest.fixture
def birth_death():
    """0 <-> S with unit rates; stationary law Poisson(1)."""
    return load_builtin("birth_death")


@pytest.fixture
def point_mass():
    return parse_network("2S1 -> S1\nS1 -> 0\n")


@pytest.fixture
def small_config():
    return SimulationConfig(seed=12345, replicates=2_000)
