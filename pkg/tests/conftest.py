import numpy as np
import pytest

from ssd_rerank.preprocess import pool_from_arrays


def random_pool(seed, n, d_raw, quality_scale=1.0):
    rng = np.random.default_rng(seed)
    return pool_from_arrays(rng.standard_normal((n, d_raw)), quality_scale * rng.standard_normal(n))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
