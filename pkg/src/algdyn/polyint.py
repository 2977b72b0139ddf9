"""Dense integer polynomial helpers (coefficient lists, low degree first)."""

from __future__ import annotations

from functools import lru_cache


def trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def mul(p: list[int], q: list[int]) -> list[int]:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def divmod_monic(p: list[int], d: list[int]) -> tuple[list[int], list[int]]:
    """Quotient and remainder by a monic divisor, exact over the integers."""
    assert d and d[-1] == 1
    r = list(p)
    dd = len(d) - 1
    if dd == 0:
        return list(r), []
    q = [0] * max(len(r) - dd, 0)
    for i in range(len(r) - 1, dd - 1, -1):
        c = r[i]
        if c == 0:
            continue
        q[i - dd] = c
        for j in range(dd + 1):
            r[i - dd + j] -= c * d[j]
    return trim(q), trim(r)


def evaluate(p: list[int], x: int) -> int:
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial (monic, exact)."""
    if n == 1:
        return (-1, 1)
    poly = [0] * (n + 1)
    poly[0], poly[n] = -1, 1
    for d in range(1, n):
        if n % d == 0:
            poly, rem = divmod_monic(poly, list(cyclotomic(d)))
            assert not rem
    return tuple(poly)
