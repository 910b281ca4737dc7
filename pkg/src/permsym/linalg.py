"""Dense complex matrices: permanents, determinants and scattering matrices.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
"""
from __future__ import annotations

import json

import numpy as np

from . import kernels
from .events import as_occupation, occupation_to_assignment

TAU_MAT = 1e-10
TAU_DET = 1e-10
MAX_PERMANENT_SIZE = 20


class MatrixError(ValueError):
    pass


def as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise MatrixError(f"expected a 2-d matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise MatrixError("matrix has non-finite entries")
    return M


def _as_square(M) -> np.ndarray:
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise MatrixError(f"expected a square matrix, got shape {M.shape}")
    return M


def unitarity_residual(U) -> float:
    U = _as_square(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def is_unitary(U, tol: float = TAU_MAT) -> bool:
    return unitarity_residual(U) < tol


def as_unitary(U, tol: float = TAU_MAT) -> np.ndarray:
    U = _as_square(U)
    res = unitarity_residual(U)
    if res >= tol:
        raise MatrixError(f"matrix is not unitary (residual {res:.3e})")
    return U


def permanent(M) -> complex:
    M = _as_square(M)
    if M.shape[0] > MAX_PERMANENT_SIZE:
        raise MatrixError(f"permanent limited to N <= {MAX_PERMANENT_SIZE}")
    return kernels.permanent(M)


def determinant(M) -> complex:
    # LAPACK getrf: LU with partial pivoting
    M = _as_square(M)
    if M.shape[0] == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(M))


def permanent_of_squared_moduli(M) -> float:
    M = _as_square(M)
    if M.shape[0] > MAX_PERMANENT_SIZE:
        raise MatrixError(f"permanent limited to N <= {MAX_PERMANENT_SIZE}")
    return kernels.permanent_nonneg(np.abs(M) ** 2)


def scattering_matrix(U, r, s) -> np.ndarray:
    """``M[a, b] = U[d_a(r), d_b(s)]`` with both assignment lists ascending."""
    U = _as_square(U)
    n = U.shape[0]
    r = as_occupation(r, n)
    s = as_occupation(s, n)
    if r.N != s.N:
        raise MatrixError(f"particle numbers differ: {r.N} in, {s.N} out")
    rows = np.array(occupation_to_assignment(r), dtype=int) - 1
    cols = np.array(occupation_to_assignment(s), dtype=int) - 1
    return U[np.ix_(rows, cols)]


def to_json_array(M) -> list:
    M = as_matrix(M)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def from_json_array(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise MatrixError("expected nested [re, im] pairs")
    return as_matrix(arr[..., 0] + 1j * arr[..., 1])


def dumps(M) -> str:
    return json.dumps(to_json_array(M))


def loads(text: str) -> np.ndarray:
    return from_json_array(json.loads(text))
