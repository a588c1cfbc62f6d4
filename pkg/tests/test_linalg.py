import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irsmatch.linalg import (
    SingularMatrixError,
    close,
    hermitian,
    matmul,
    right_pseudo_inverse,
    solve,
    vec_norm2,
)

from conftest import crandn


def triple_loop(a, b):
    out = [[0j] * len(b[0]) for _ in range(len(a))]
    for i in range(len(a)):
        for j in range(len(b[0])):
            acc = 0j
            for t in range(len(b)):
                acc += complex(a[i][t]) * complex(b[t][j])
            out[i][j] = acc
    return np.array(out)


def test_matmul_identity_and_i_squared(rng):
    m = crandn(rng, 2, 2)
    assert close(matmul(np.eye(2), m), m)
    assert matmul([[1j]], [[1j]])[0, 0] == -1


def test_matmul_rejects_mismatch():
    with pytest.raises(ValueError):
        matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_matmul_matches_triple_loop():
    rng = np.random.default_rng(7)
    for _ in range(100):
        r, k, c = rng.integers(1, 9, size=3)
        a, b = crandn(rng, r, k), crandn(rng, k, c)
        expected = triple_loop(a.tolist(), b.tolist())
        assert np.allclose(matmul(a, b), expected, rtol=1e-12, atol=1e-12)


def test_hermitian_examples(rng):
    s = rng.standard_normal((3, 3))
    s = s + s.T
    assert np.array_equal(hermitian(s), s)
    assert hermitian([[1j]])[0, 0] == -1j
    m = crandn(rng, 3, 5)
    assert np.array_equal(hermitian(hermitian(m)), m)
    h = hermitian(m)
    for i in range(5):
        for j in range(3):
            assert h[i, j] == np.conj(m[j, i])


@settings(max_examples=50, deadline=None)
@given(r=st.integers(1, 6), k=st.integers(1, 6), c=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_hermitian_of_product(r, k, c, seed):
    rng = np.random.default_rng(seed)
    a, b = crandn(rng, r, k), crandn(rng, k, c)
    lhs = hermitian(matmul(a, b))
    rhs = matmul(hermitian(b), hermitian(a))
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_vec_norm2_examples():
    assert vec_norm2([1, 0]) == 1.0
    assert abs(vec_norm2([1j, 1j]) - np.sqrt(2)) < 1e-15
    assert vec_norm2([3 + 4j]) == 5.0
    assert vec_norm2([0, 0, 0]) == 0.0


def test_pinv_identity(backend):
    assert close(right_pseudo_inverse(np.eye(3)), np.eye(3))


def test_pinv_diagonal(backend):
    w = right_pseudo_inverse([[2, 0, 0], [0, 4, 0]])
    assert close(w, np.array([[0.5, 0], [0, 0.25], [0, 0]]))


def test_pinv_residual(backend):
    rng = np.random.default_rng(3)
    for _ in range(50):
        h = crandn(rng, 4, 8)
        w = right_pseudo_inverse(h)
        assert np.linalg.norm(h @ w - np.eye(4)) / 2.0 < 1e-9


def test_pinv_singular_raises_with_pivot(backend):
    h = np.array([[1, 2, 3], [2, 4, 6]], dtype=complex)
    with pytest.raises(SingularMatrixError) as info:
        right_pseudo_inverse(h)
    assert info.value.pivot >= 0.0


def test_pinv_rejects_tall(backend):
    with pytest.raises(ValueError):
        right_pseudo_inverse(np.ones((3, 2)))


def test_solve_matches_numpy(backend):
    rng = np.random.default_rng(11)
    a, b = crandn(rng, 6, 6), crandn(rng, 6, 2)
    assert np.allclose(solve(a, b), np.linalg.solve(a, b), rtol=1e-10, atol=1e-12)


def test_solve_zero_matrix(backend):
    with pytest.raises(SingularMatrixError):
        solve(np.zeros((2, 2)), np.ones(2))


def test_close_is_hybrid():
    assert close(1.0 + 1e-10, 1.0)
    assert not close(1.0 + 1e-6, 1.0)
    assert close(1e-13, 0.0)
    assert not close(1e-11, 0.0)
