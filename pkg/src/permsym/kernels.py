"""Backend selection for the permanent kernels.

The compiled extension is used when it imports; otherwise, or when
``PERMSYM_PURE_PYTHON=1`` is set, the numpy fallback is used.
"""
import os

from . import _ryser_py as python_backend

try:
    if os.environ.get("PERMSYM_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _ryser_ext as _impl
    BACKEND = "cython"
except ImportError:
    _impl = python_backend
    BACKEND = "python"

permanent = _impl.permanent
permanent_batch = _impl.permanent_batch
permanent_nonneg = _impl.permanent_nonneg
permanent_nonneg_batch = _impl.permanent_nonneg_batch

__all__ = [
    "BACKEND",
    "permanent",
    "permanent_batch",
    "permanent_nonneg",
    "permanent_nonneg_batch",
    "python_backend",
]
