import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import naive_determinant, naive_permanent, random_unitary
from permsym import kernels
from permsym.linalg import (
    MatrixError,
    as_unitary,
    determinant,
    dumps,
    loads,
    permanent,
    permanent_of_squared_moduli,
    scattering_matrix,
)


def _complex(rng, N):
    return rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))


@pytest.mark.parametrize("N", range(0, 7))
def test_permanent_and_determinant_vs_expansion(rng, N):
    for _ in range(10):
        M = _complex(rng, N)
        ref = naive_permanent(M) if N else 1.0
        assert abs(permanent(M) - ref) <= 1e-10 * max(1.0, abs(ref))
        ref = naive_determinant(M) if N else 1.0
        assert abs(determinant(M) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_small_known_values():
    assert permanent(np.ones((3, 3))) == pytest.approx(6)
    assert abs(permanent(np.array([[1, 1], [1, -1]]))) < 1e-15
    assert permanent_of_squared_moduli(np.array([[1, 0], [0, 1]])) == 1.0


def test_nonneg_permanent_exact_zero():
    M = np.array([[1, 0, 0], [1, 0, 0], [1, 1, 1]], dtype=float)
    assert permanent_of_squared_moduli(M) == 0.0


@given(st.integers(1, 6), st.integers(0, 10_000))
def test_permanent_invariances(N, seed):
    rng = np.random.default_rng(seed)
    M = _complex(rng, N)
    P = rng.permutation(N)
    assert np.isclose(permanent(M[P]), permanent(M))
    assert np.isclose(permanent(M.T), permanent(M))
    c = 0.7 - 0.2j
    Mc = M.copy()
    Mc[0] *= c
    assert np.isclose(permanent(Mc), c * permanent(M))


@given(st.integers(1, 7), st.integers(0, 10_000))
def test_backends_agree(N, seed):
    rng = np.random.default_rng(seed)
    M = _complex(rng, N)
    py = kernels.python_backend
    assert np.isclose(kernels.permanent(M), py.permanent(M), rtol=1e-12, atol=1e-12)
    batch = np.stack([M, 2 * M, M.conj()])
    assert np.allclose(kernels.permanent_batch(batch), py.permanent_batch(batch))
    A = np.abs(M) ** 2
    assert np.isclose(kernels.permanent_nonneg(A), py.permanent_nonneg(A))
    assert np.allclose(kernels.permanent_nonneg_batch(np.stack([A, A.T])), py.permanent_nonneg_batch(np.stack([A, A.T])))


def test_scattering_matrix_repeats_rows_and_columns(rng):
    U = random_unitary(4, rng)
    M = scattering_matrix(U, [2, 0, 1, 0], [0, 1, 0, 2])
    assert M.shape == (3, 3)
    assert np.allclose(M[0], M[1])
    assert np.allclose(M[:, 1], M[:, 2])
    assert M[2, 0] == U[2, 1]
    with pytest.raises(MatrixError):
        scattering_matrix(U, [1, 0, 0, 0], [1, 1, 0, 0])


def test_unitarity_and_json(rng):
    U = random_unitary(5, rng)
    assert np.allclose(loads(dumps(U)), U)
    with pytest.raises(MatrixError):
        as_unitary(U * 1.01)
    with pytest.raises(MatrixError):
        permanent(np.ones((2, 3)))
    with pytest.raises(MatrixError):
        permanent(np.full((2, 2), np.nan))
