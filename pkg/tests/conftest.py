import numpy as np
import pytest

from fraxol.geometry import BallDomain
from fraxol.model import DiscreteSystem, cached_grid, cached_operator
from fraxol.presets import existence_example, nonexistence_example

UNIT_DISK = BallDomain(2, 1.0)


@pytest.fixture(scope="session")
def disk():
    return UNIT_DISK


@pytest.fixture(scope="session")
def grid32():
    return cached_grid(UNIT_DISK, 32)


@pytest.fixture(scope="session")
def op_factory():
    def make(s, resolution=32):
        return cached_operator(UNIT_DISK, resolution, s)
    return make


@pytest.fixture(scope="session")
def ex_exist():
    return DiscreteSystem.build(existence_example())


@pytest.fixture(scope="session")
def ex_nonexist():
    return DiscreteSystem.build(nonexistence_example())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
