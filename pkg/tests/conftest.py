import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_grid():
    from intentrack import GridMap

    return GridMap(9, 7, 1.0)
