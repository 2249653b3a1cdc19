import numpy as np
import pytest

from cachefx.cache import make_cache


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_cache():
    return make_cache("assoc", 64, 4, policy="lru", seed=1)
