"""Pure-Python/numpy fallback for the hot kernels.

Mirrors the compiled backend operation-for-operation so both produce
bit-identical results: the compensated sums run the same IEEE double
operations in the same order, and the GF(2) elimination picks the same
pivots.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"


def logabs_kahan_masked(values, exclude_mask, slab_size):
    """Kahan-compensated sum of log|v| over the non-excluded entries.

    ``values`` is a flattened complex128 array in lexicographic grid order,
    ``exclude_mask`` a bool array of the same length.  The sum is formed per
    slab of ``slab_size`` consecutive entries, and the slab partials are
    combined in slab order, again with compensation, so the result does not
    depend on how slabs might be distributed over workers.

    log|v| is computed as 0.5*log(re^2 + im^2) in both backends.

    Returns (total, min_abs_nonexcluded, n_summed).  min_abs is +inf when
    everything is excluded.
    """
    re = values.real.tolist()
    im = values.imag.tolist()
    mask = exclude_mask.tolist()
    n = len(re)
    total = 0.0
    total_c = 0.0
    min_sq = math.inf
    n_summed = 0
    for start in range(0, n, slab_size):
        s = 0.0
        c = 0.0
        for i in range(start, min(start + slab_size, n)):
            if mask[i]:
                continue
            sq = re[i] * re[i] + im[i] * im[i]
            if sq < min_sq:
                min_sq = sq
            y = 0.5 * math.log(sq) - c
            t = s + y
            c = (t - s) - y
            s = t
            n_summed += 1
        y = s - total_c
        t = total + y
        total_c = (t - total) - y
        total = t
    return total, math.sqrt(min_sq) if min_sq < math.inf else math.inf, n_summed


def gf2_rref(mat, ncols):
    """In-place reduced row echelon form of a bit-packed GF(2) matrix.

    ``mat`` is (n_rows, n_words) uint64 with column j stored at bit (j & 63)
    of word (j >> 6).  Pivots are searched over the first ``ncols`` columns
    only; any further columns (e.g. an augmented right-hand side) are carried
    along in the row operations.

    Returns (rank, pivot_columns).
    """
    n_rows = mat.shape[0]
    rank = 0
    pivots = []
    one = np.uint64(1)
    for col in range(ncols):
        if rank == n_rows:
            break
        w = col >> 6
        b = np.uint64(col & 63)
        hits = np.nonzero((mat[rank:, w] >> b) & one)[0]
        if hits.size == 0:
            continue
        p = rank + int(hits[0])
        if p != rank:
            mat[[rank, p]] = mat[[p, rank]]
        others = np.nonzero((mat[:, w] >> b) & one)[0]
        others = others[others != rank]
        if others.size:
            mat[others] ^= mat[rank]
        pivots.append(col)
        rank += 1
    return rank, pivots
