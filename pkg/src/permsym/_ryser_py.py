"""Pure-Python/numpy fallback for the permanent kernels in ``_ryser_ext``."""
from __future__ import annotations

import numpy as np

MAX_N = 20
# subsets processed per numpy chunk in the batched Ryser sum
_CHUNK = 1 << 12


def _check_square(shape):
    if shape[-1] != shape[-2]:
        raise ValueError("permanent needs square matrices")
    if shape[-1] > MAX_N:
        raise ValueError(f"matrix size {shape[-1]} exceeds the supported maximum {MAX_N}")


def permanent(a) -> complex:
    """Ryser's formula, Gray-code order, plain Python arithmetic."""
    a = np.asarray(a, dtype=complex)
    _check_square(a.shape)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    cols = [[complex(x) for x in a[:, j]] for j in range(n)]
    rowsum = [0j] * n
    acc = 0j
    gray = 0
    size = 0
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        gray ^= 1 << j
        col = cols[j]
        if gray >> j & 1:
            rowsum = [x + y for x, y in zip(rowsum, col)]
            size += 1
        else:
            rowsum = [x - y for x, y in zip(rowsum, col)]
            size -= 1
        p = rowsum[0]
        for x in rowsum[1:]:
            p *= x
        acc += -p if (n - size) & 1 else p
    return acc


def _subset_table(n: int, start: int, stop: int) -> np.ndarray:
    masks = np.arange(start, stop, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(float)


def permanent_batch(a) -> np.ndarray:
    """Ryser's formula vectorised over matrices and subsets."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 3:
        raise ValueError("expected a stack of matrices")
    _check_square(a.shape)
    nb, n = a.shape[0], a.shape[1]
    if n == 0:
        return np.ones(nb, dtype=complex)
    out = np.zeros(nb, dtype=complex)
    for start in range(1, 1 << n, _CHUNK):
        stop = min(start + _CHUNK, 1 << n)
        S = _subset_table(n, start, stop)
        signs = np.where((n - S.sum(axis=1)) % 2 == 1, -1.0, 1.0)
        rowsums = a @ S.T  # (nb, n, subsets)
        out += np.prod(rowsums, axis=1) @ signs
    return out


def permanent_nonneg(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(permanent_nonneg_batch(a[None])[0])


def permanent_nonneg_batch(a) -> np.ndarray:
    """Subset dynamic programme; only additions, so structural zeros stay exact."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 3:
        raise ValueError("expected a stack of matrices")
    _check_square(a.shape)
    if np.any(a < 0):
        raise ValueError("permanent_nonneg needs non-negative matrices")
    nb, n = a.shape[0], a.shape[1]
    if n == 0:
        return np.ones(nb)
    f = np.zeros((nb, 1 << n))
    f[:, 0] = 1.0
    for mask in range(1, 1 << n):
        i = bin(mask).count("1") - 1
        s = np.zeros(nb)
        for j in range(n):
            if mask >> j & 1:
                s += f[:, mask ^ (1 << j)] * a[:, i, j]
        f[:, mask] = s
    return f[:, -1]
