#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs both backends on the same inputs, checks they agree (bit-identical for
the compensated log sums, identical ranks/pivots for GF(2) elimination),
and prints the speedups.

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from algdyn._kernels import pack_bool_rows, pure

try:
    from algdyn._kernels import _fast as fast
except ImportError:
    fast = None


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return out, best


def bench_logabs(n_points: int):
    rng = np.random.default_rng(1)
    values = (rng.normal(size=n_points) + 1j * rng.normal(size=n_points)).astype(
        np.complex128
    )
    mask = (rng.random(n_points) < 0.01).astype(np.uint8)
    slab = 1 << 16
    res_p, t_p = timed(pure.logabs_kahan_masked, values, mask, slab, repeat=1)
    row = f"log-abs sum, {n_points:>9} pts   pure {t_p:8.3f}s"
    if fast is not None:
        res_f, t_f = timed(fast.logabs_kahan_masked, values, mask, slab)
        assert res_f[0].hex() == res_p[0].hex(), "backends disagree"
        row += f"   compiled {t_f:8.4f}s   speedup {t_p / t_f:7.1f}x"
    print(row)


def bench_gf2(window: int):
    # constraint matrix of the three-term F_2 relation on a window x window
    # box: (window-1)^2 rows, window^2 columns
    n_cols = window * window
    rows = []
    for i in range(window - 1):
        for j in range(window - 1):
            rows.append([i * window + j, i * window + j + 1, (i + 1) * window + j])
    dense = np.zeros((len(rows), n_cols), dtype=np.uint8)
    for r, cols in enumerate(rows):
        dense[r, cols] = 1
    packed = pack_bool_rows(dense)
    work_p = packed.copy()
    res_p, t_p = timed(pure.gf2_rref, work_p, n_cols, repeat=1)
    row = f"gf2 rref, {len(rows):>5}x{n_cols:<6} pure {t_p:8.3f}s"
    if fast is not None:
        work_f = packed.copy()
        res_f, t_f = timed(fast.gf2_rref, work_f, n_cols, repeat=1)
        assert res_f[0] == res_p[0] and list(res_f[1]) == list(res_p[1])
        row += f"   compiled {t_f:8.4f}s   speedup {t_p / t_f:7.1f}x"
    print(row)


def main():
    print(f"compiled backend available: {fast is not None}")
    for n in (1 << 18, 1 << 20, 4 << 20):
        bench_logabs(n)
    for window in (16, 32, 48, 64):
        bench_gf2(window)


if __name__ == "__main__":
    main()
