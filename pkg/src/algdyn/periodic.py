"""Exact periodic-point counts for toral automorphisms and principal
algebraic Z^d-actions, with growth-rate-versus-entropy traces.

Toral counts are |det(A^n - I)| as exact big integers.  For a principal
action the points fixed by the n-th square sublattice are counted two
independent ways when the grid is small enough: a floating product of
|f| over the n-grid, and the exact determinant of multiplication by f on
Z[u_1..u_d]/(u_i^n - 1); disagreement is an internal error, not a result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .intlinalg import bareiss_det, identity, mat_pow, mat_sub, charpoly_int
from .laurent import GridSpec, LaurentPoly, grid_eval
from .local import IntPoly, mahler_1d
from .torus import riemann_from_eval, RiemannSumResult

EXACT_DET_LIMIT = 4096  # largest |K| for the exact determinant cross-check
CROSS_CHECK_REL_TOL = 1e-8


class ConsistencyError(RuntimeError):
    """Exact and floating periodic-point counts disagree."""


def _log_bigint(n: int) -> float:
    try:
        return math.log(n)
    except OverflowError:
        bl = n.bit_length()
        return math.log(n >> (bl - 53)) + (bl - 53) * math.log(2)


@dataclass
class PeriodicCountToral:
    matrix: list[list[int]]
    n: int
    count: int
    infinite_fixed_set: bool


def toral_periodic_count(A: list[list[int]], n: int) -> PeriodicCountToral:
    """|det(A^n - I)|, the number of points of period n on the torus.

    A zero determinant means A^n has eigenvalue 1 and the fixed set is a
    union of positive-dimensional tori; that is flagged, not conflated with
    an empty count.
    """
    if n < 1:
        raise ValueError("period must be >= 1")
    A = [[int(x) for x in row] for row in A]
    det = bareiss_det(mat_sub(mat_pow(A, n), identity(len(A))))
    return PeriodicCountToral(
        matrix=A, n=n, count=abs(det), infinite_fixed_set=(det == 0)
    )


@dataclass
class PeriodicCountPrincipal:
    f: LaurentPoly
    n: int
    degenerate: bool
    component_rate: float  # Riemann-sum value on the n-grid, zeros excluded
    log_full_product: float  # sum of log|f| over the whole grid; -inf if degenerate
    full_product: float  # exp of the above (inf on overflow, 0 if degenerate)
    exact_product: int | None  # |det| of multiplication by f, when computed
    excluded_points: int
    grid: RiemannSumResult


def _mult_matrix(f: LaurentPoly, n: int) -> list[list[int]]:
    """Matrix of multiplication by f on Z[u_1..u_d]/(u_i^n - 1), in the
    monomial basis ordered lexicographically."""
    d = f.d
    orders = (n,) * d
    size = n**d

    def flat(idx):
        out = 0
        for k in idx:
            out = out * n + k
        return out

    mat = [[0] * size for _ in range(size)]
    import itertools

    for x in itertools.product(range(n), repeat=d):
        col = flat(x)
        for m, c in f.terms.items():
            y = tuple((a + b) % n for a, b in zip(x, m))
            mat[flat(y)][col] += c
    return mat


def principal_periodic_count(
    f: LaurentPoly, n: int, exact_limit: int = EXACT_DET_LIMIT
) -> PeriodicCountPrincipal:
    """Count (components of) points fixed by the sublattice n*Z^d.

    Degeneracy (f vanishing somewhere on the n-grid) is decided by the
    certified zero mask, never by float thresholds; the component rate then
    uses the zero-excluded sum.
    """
    if f.is_zero:
        raise ValueError("f must be nonzero")
    if n < 1:
        raise ValueError("period must be >= 1")
    spec = GridSpec((n,) * f.d)
    ev = grid_eval(f, spec)
    rate = riemann_from_eval(ev)
    degenerate = ev.n_certified_zeros > 0

    if degenerate:
        log_prod = -math.inf
        full_product = 0.0
    else:
        log_prod = rate.value * spec.size
        full_product = math.exp(log_prod) if log_prod < 709 else math.inf

    exact_product: int | None = None
    if spec.size <= exact_limit:
        exact_product = abs(bareiss_det(_mult_matrix(f, n)))
        if degenerate:
            if exact_product != 0:
                raise ConsistencyError(
                    f"grid shows certified zeros but exact determinant is {exact_product}"
                )
        else:
            if exact_product == 0:
                raise ConsistencyError(
                    "exact determinant vanishes but no grid zero was certified"
                )
            gap = abs(_log_bigint(exact_product) - log_prod)
            if gap > CROSS_CHECK_REL_TOL * max(1.0, abs(log_prod)):
                raise ConsistencyError(
                    f"exact/floating product mismatch: log gap {gap:.3e} at n={n}"
                )

    return PeriodicCountPrincipal(
        f=f,
        n=n,
        degenerate=degenerate,
        component_rate=rate.value,
        log_full_product=log_prod,
        full_product=full_product,
        exact_product=exact_product,
        excluded_points=rate.excluded_points,
        grid=rate,
    )


@dataclass
class GrowthPoint:
    n: int
    count_or_log: float | int
    normalized_rate: float | None
    target: float
    gap: float | None


def growth_rate_trace(subject, n_list: list[int], target: float | None = None) -> list[GrowthPoint]:
    """Normalized log counts along n_list against the entropy target.

    For an integer matrix the rate is (1/n) log|det(A^n - I)| and the target
    is the Mahler measure of its characteristic polynomial; for a Laurent
    polynomial the rate is the zero-excluded grid mean and the target a
    large-grid estimate (overridable).
    """
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing")
    out = []
    if isinstance(subject, LaurentPoly):
        if target is None:
            from .torus import torsion_aware_square_grids

            grids = torsion_aware_square_grids(
                subject, list(range(max(n_list) * 2, max(n_list) * 2 + 24))
            )
            if not grids:
                grids = [GridSpec((max(n_list) * 2 + 1,) * subject.d)]
            target = riemann_from_eval(grid_eval(subject, grids[0])).value
        for n in n_list:
            res = principal_periodic_count(subject, n, exact_limit=0)
            rate = res.component_rate
            out.append(
                GrowthPoint(
                    n=n,
                    count_or_log=res.log_full_product,
                    normalized_rate=rate,
                    target=target,
                    gap=abs(rate - target),
                )
            )
    else:
        A = [[int(x) for x in row] for row in subject]
        if target is None:
            target = mahler_1d(IntPoly(charpoly_int(A)))
        for n in n_list:
            res = toral_periodic_count(A, n)
            if res.infinite_fixed_set:
                out.append(GrowthPoint(n=n, count_or_log=0, normalized_rate=None, target=target, gap=None))
                continue
            rate = _log_bigint(res.count) / n if res.count > 0 else -math.inf
            out.append(
                GrowthPoint(
                    n=n,
                    count_or_log=res.count,
                    normalized_rate=rate,
                    target=target,
                    gap=abs(rate - target),
                )
            )
    return out
