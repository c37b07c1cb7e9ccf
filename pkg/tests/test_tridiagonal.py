import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import eigh_tridiagonal

from tglattice.errors import DomainError
from tglattice.tridiagonal import bisect_eigenvalues, fix_sign, lowest_eigenpairs, split_blocks


def dense(d, e):
    return np.diag(d) + np.diag(e, 1) + np.diag(e, -1)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2 ** 32 - 1))
def test_matches_dense_solver(n, seed):
    rng = np.random.default_rng(seed)
    d = rng.normal(size=n) * 5
    e = rng.normal(size=n - 1)
    k = min(n, 4)
    w, V = lowest_eigenpairs(d, e, k)
    ref = np.linalg.eigvalsh(dense(d, e))[:k]
    assert np.allclose(w, ref, atol=1e-12 * max(1, np.abs(ref).max()))
    assert np.allclose(V.T @ V, np.eye(k), atol=1e-10)
    T = dense(d, e)
    assert np.allclose(T @ V, V * w, atol=1e-9 * max(1, np.abs(d).max()))


def test_matches_scipy_on_mathieu_matrix():
    K = 25
    n = np.arange(-K, K + 1)
    d = (2 / 7 + 2 * n) ** 2
    e = np.full(2 * K, 3.0)
    w, V = lowest_eigenpairs(d, e, 5)
    w_ref, V_ref = eigh_tridiagonal(d, e, select="i", select_range=(0, 4))
    assert np.allclose(w, w_ref, rtol=0, atol=1e-11)
    assert np.allclose(np.abs(V), np.abs(V_ref), atol=1e-10)


def test_diagonal_matrix_gives_coordinate_vectors():
    d = np.array([16.0, 4.0, 0.0, 4.0, 16.0])
    w, V = lowest_eigenpairs(d, np.zeros(4), 5)
    assert w.tolist() == [0.0, 4.0, 4.0, 16.0, 16.0]
    assert sorted(map(tuple, np.abs(V.T))) == sorted(map(tuple, np.eye(5)))


def test_split_blocks():
    assert split_blocks([1.0, 2.0, 3.0, 4.0], [1.0, 0.0, 1.0]) == [(0, 2), (2, 4)]
    assert split_blocks([1.0, 2.0], [0.0]) == [(0, 1), (1, 2)]


def test_bisection_reaches_ulp_accuracy():
    w = bisect_eigenvalues([2.0, 2.0], [1.0], 2)
    assert w[0] == pytest.approx(1.0, abs=4e-16)
    assert w[1] == pytest.approx(3.0, rel=4e-16)


def test_sign_convention():
    v = fix_sign(np.array([0.1, -0.9, 0.3]))
    assert v[1] > 0
    tied = fix_sign(np.array([-0.5, 0.1, 0.5]))
    assert tied[0] > 0 and tied[2] < 0


def test_bad_request():
    with pytest.raises(DomainError):
        lowest_eigenpairs([1.0, 2.0], [0.5], 3)
    with pytest.raises(DomainError):
        lowest_eigenpairs([1.0, 2.0], [0.5, 0.1], 1)
