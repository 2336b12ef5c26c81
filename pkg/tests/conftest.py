import numpy as np
import pytest

P_GRID = [1.5, 2.0, 2.5, 4.0]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
