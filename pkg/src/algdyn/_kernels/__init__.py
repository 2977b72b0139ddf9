"""Hot-kernel backend selection.

The compiled Cython extension is preferred when it built; otherwise the
pure numpy/Python implementation is used.  Set ALGDYN_PURE=1 to force the
fallback (the benchmark suite does this to compare the two).
"""

from __future__ import annotations

import os

import numpy as np

from . import pure

if os.environ.get("ALGDYN_PURE"):
    _impl = pure
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND
logabs_kahan_masked = _impl.logabs_kahan_masked
gf2_rref = _impl.gf2_rref


def pack_bool_rows(rows: np.ndarray, extra_cols: int = 0) -> np.ndarray:
    """Pack a (n_rows, n_cols) 0/1 matrix into uint64 words for gf2_rref.

    ``extra_cols`` reserves room for augmented columns past n_cols.
    """
    rows = np.asarray(rows, dtype=np.uint8)
    n_rows, n_cols = rows.shape
    n_words = (n_cols + extra_cols + 63) >> 6
    packed = np.zeros((n_rows, n_words), dtype=np.uint64)
    for j in range(n_cols):
        col = rows[:, j].astype(np.uint64)
        packed[:, j >> 6] |= col << np.uint64(j & 63)
    return packed


def gf2_set_bit(mat: np.ndarray, row: int, col: int) -> None:
    mat[row, col >> 6] |= np.uint64(1) << np.uint64(col & 63)


def gf2_get_bit(mat: np.ndarray, row: int, col: int) -> int:
    return int((mat[row, col >> 6] >> np.uint64(col & 63)) & np.uint64(1))


def gf2_nullspace(mat: np.ndarray, ncols: int) -> list[list[int]]:
    """Nullspace basis of a packed GF(2) matrix (destroys ``mat``).

    Returns one support list (column indices of the 1-bits) per basis
    vector, one vector per non-pivot column.
    """
    rank, pivots = gf2_rref(mat, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [free]
        for i, pc in enumerate(pivots):
            if gf2_get_bit(mat, i, free):
                vec.append(pc)
        basis.append(sorted(vec))
    return basis
