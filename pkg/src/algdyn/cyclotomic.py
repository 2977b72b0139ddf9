"""Exact decisions about polynomial values at roots of unity.

A grid point of orders (n_1, ..., n_d) lives in the cyclotomic field
Q(zeta_L), L = lcm(n_i).  The value of an integer Laurent polynomial there
is an element of Z[zeta_L]; it is zero iff its exponent-coefficient vector
reduces to zero modulo the L-th cyclotomic polynomial.  That reduction is
the ground truth used here.

For small conductors the exact test runs directly.  For large ones a
rigorous multiprecision prescreen usually certifies the value nonzero much
faster (value modulus > computable error bound); the exact reduction is the
escalation path when the prescreen cannot separate the value from zero --
intervals alone can shrink forever around a true zero.
"""

from __future__ import annotations

import math

import mpmath as mp

from .polyint import cyclotomic, divmod_monic

# conductor up to which the exact reduction is tried before any float work
EXACT_FIRST_LCM = 512
_PRESCREEN_DPS = (30, 60, 120, 240)
_MAX_DPS = 2000
_REL_TOL = 1e-8  # relative accuracy for refined log-moduli


def _root_exponents(f, orders, idx) -> dict[int, int]:
    """Collapse f's terms to exponents of zeta_L at the given grid point."""
    L = math.lcm(*orders)
    strides = [L // n for n in orders]
    vec: dict[int, int] = {}
    for m, c in f.terms.items():
        e = sum(s * k * mi for s, k, mi in zip(strides, idx, m)) % L
        vec[e] = vec.get(e, 0) + c
    return {e: c for e, c in vec.items() if c}


def exact_is_zero(f, orders, idx) -> bool:
    """Exact zero test of f at the grid point, any conductor."""
    L = math.lcm(*orders)
    vec_map = _root_exponents(f, orders, idx)
    if not vec_map:
        return True
    vec = [0] * L
    for e, c in vec_map.items():
        vec[e] = c
    _, rem = divmod_monic(vec, list(cyclotomic(L)))
    return not rem


def _value_and_bound(vec_map: dict[int, int], L: int):
    """Evaluate sum c_e * zeta_L^e at current mpmath precision, plus a
    rigorous bound on the rounding error of that evaluation."""
    val = mp.mpc(0)
    l1 = 0
    for e, c in vec_map.items():
        val += c * mp.expjpi(mp.mpf(2 * e) / L)
        l1 += abs(c)
    # each term: argument rounding + expjpi rounding + accumulation,
    # all within a few ulp; 2^-prec+4 per unit of |c| is a safe envelope
    bound = mp.mpf(l1) * mp.mpf(2) ** (-mp.mp.prec + 4) * (len(vec_map) + 4)
    return val, bound


def accurate_logabs(f, orders, idx, max_dps: int = _MAX_DPS) -> float | None:
    """log|f| at the grid point, certified nonzero and accurate to ~1e-8
    relative; None if the ladder cannot separate the value from zero."""
    L = math.lcm(*orders)
    vec_map = _root_exponents(f, orders, idx)
    if not vec_map:
        return None
    dps = _PRESCREEN_DPS[0]
    while dps <= max_dps:
        with mp.workdps(dps):
            val, bound = _value_and_bound(vec_map, L)
            a = abs(val)
            if a > 2 * bound and bound < a * _REL_TOL:
                return float(mp.log(a))
        dps *= 2
    return None


def certify_point(f, orders, idx) -> tuple[bool, float | None]:
    """Decide whether f vanishes at the grid point.

    Returns (True, None) for a certified zero, else (False, log|f|) with the
    log-modulus accurate enough to feed a Riemann sum.
    """
    L = math.lcm(*orders)
    if L <= EXACT_FIRST_LCM:
        if exact_is_zero(f, orders, idx):
            return True, None
        return False, accurate_logabs(f, orders, idx)
    for dps in _PRESCREEN_DPS:
        with mp.workdps(dps):
            vec_map = _root_exponents(f, orders, idx)
            if not vec_map:
                return True, None
            val, bound = _value_and_bound(vec_map, L)
            if abs(val) > 2 * bound:
                return False, accurate_logabs(f, orders, idx)
    if exact_is_zero(f, orders, idx):
        return True, None
    return False, accurate_logabs(f, orders, idx)
