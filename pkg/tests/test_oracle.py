import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ssd_rerank.oracle import (
    build_trajectory_tensor,
    classical_gram_schmidt,
    dpp_exhaustive_step,
    dpp_log_gain,
    gram_det_volume,
)


def test_trajectory_windows():
    seq = np.arange(12.0).reshape(6, 2)
    tt = build_trajectory_tensor(seq, 3)
    assert tt.data.shape == (4, 3, 2) and tt.L == 4
    for k in range(4):
        assert np.array_equal(tt.data[k], seq[k:k + 3])
    assert np.array_equal(tt.data[0].ravel(), seq[:3].ravel())


def test_trajectory_is_hankel_along_time():
    seq = np.random.default_rng(0).standard_normal((9, 3))
    tt = build_trajectory_tensor(seq, 4)
    for a in range(tt.L):
        for b in range(4):
            # entry (a, b) depends only on a + b
            assert np.array_equal(tt.data[a, b], seq[a + b])


def test_trajectory_window_longer_than_sequence():
    seq = np.ones((3, 2))
    tt = build_trajectory_tensor(seq, 5)
    assert tt.L == 1 and tt.data.shape == (1, 3, 2)


def test_trajectory_rejects_bad_input():
    with pytest.raises(ValueError):
        build_trajectory_tensor(np.ones((3, 2)), 0)
    with pytest.raises(ValueError):
        build_trajectory_tensor(np.ones(3), 2)


def test_volume_examples():
    assert gram_det_volume([[1.0, 0.0], [0.0, 1.0]]) == pytest.approx(1.0)
    assert gram_det_volume([[2.0, 0.0], [1.0, 3.0]]) == pytest.approx(6.0)
    assert gram_det_volume([[1.0, 1.0], [2.0, 2.0]]) == pytest.approx(0.0, abs=1e-7)
    assert gram_det_volume([[3.0, 4.0]]) == pytest.approx(5.0)


def test_classical_gram_schmidt_example():
    out = classical_gram_schmidt([[1.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(out, [[1.0, 1.0], [0.5, -0.5]])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_volume_is_product_of_gram_schmidt_norms(seed, k):
    X = np.random.default_rng(seed).standard_normal((k, 8))
    B = classical_gram_schmidt(X)
    want = math.prod(np.linalg.norm(B, axis=1))
    assert gram_det_volume(X) == pytest.approx(want, rel=1e-9)
    G = B @ B.T
    assert np.max(np.abs(G - np.diag(np.diag(G)))) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_hadamard_bound(seed, k):
    X = np.random.default_rng(seed).standard_normal((k, 8))
    assert gram_det_volume(X) <= math.prod(np.linalg.norm(X, axis=1)) * (1 + 1e-12)


def test_exhaustive_step_on_identity_takes_lowest_index():
    assert dpp_exhaustive_step(np.eye(4), [], range(4)) == (0, 0.0)


def test_log_gain_example():
    K = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert dpp_log_gain(K, [0], 1) == pytest.approx(math.log(1.5))
    assert dpp_exhaustive_step(K, [0], [1]) == (1, pytest.approx(math.log(1.5)))


def test_log_gain_with_singular_conditioning_uses_schur_complement():
    V = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    K = V @ V.T
    assert dpp_log_gain(K, [0, 1], 2) == pytest.approx(math.log(4.0))
    assert dpp_log_gain(K, [0], 1) == -math.inf
