"""Multivariate logarithmic Mahler measure over finite subgroups of the
torus: Riemann sums that exclude exactly the certified zeros, convergence
traces over grid schedules, near-zero probing, and one-variable slices
along (s, s^n) subgroups.

Near-zero grid points that are *not* certified zeros stay in the sum (with
their log-moduli recomputed at high precision); excluding them would bias
the estimate and hide exactly the diophantine behaviour these sums probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels
from .laurent import GridEvaluation, GridSpec, LaurentPoly, grid_eval
from .local import IntPoly, mahler_1d


class AllGridZeroError(ValueError):
    """The polynomial vanishes at every grid point."""


@dataclass
class RiemannSumResult:
    spec: GridSpec
    value: float
    excluded_points: int
    min_abs_nonzero: float
    slab_size: int
    n_points: int

    def to_json(self) -> dict:
        return {
            "spec": list(self.spec.orders),
            "value": self.value,
            "excluded": self.excluded_points,
            "min_abs_nonzero": self.min_abs_nonzero,
            "slab_size": self.slab_size,
        }


def riemann_from_eval(ev: GridEvaluation) -> RiemannSumResult:
    """Mean of log|f| over the grid minus its certified zeros.

    Summation is Kahan-compensated in fixed lexicographic order over slabs
    of ``ev.slab_size`` points; high-accuracy corrections for near-zero
    points are added afterwards in index order, so the result is a
    deterministic function of the evaluation.
    """
    size = ev.spec.size
    flat_mask = ev.zero_mask.reshape(-1).copy()
    n_zero = int(flat_mask.sum())
    if n_zero == size:
        raise AllGridZeroError("polynomial vanishes on the whole grid")
    for idx in ev.refined_logabs:
        flat_mask[idx] = True
    total, min_abs, _ = _kernels.logabs_kahan_masked(
        ev.values.reshape(-1), flat_mask, ev.slab_size
    )
    for idx in sorted(ev.refined_logabs):
        la = ev.refined_logabs[idx]
        total += la
        min_abs = min(min_abs, math.exp(la))
    return RiemannSumResult(
        spec=ev.spec,
        value=total / size,
        excluded_points=n_zero,
        min_abs_nonzero=min_abs,
        slab_size=ev.slab_size,
        n_points=size,
    )


def riemann_mahler(f: LaurentPoly, spec: GridSpec, **grid_kwargs) -> RiemannSumResult:
    if f.is_zero:
        raise ValueError("Riemann-sum Mahler measure of 0 is undefined")
    return riemann_from_eval(grid_eval(f, spec, **grid_kwargs))


@dataclass
class ConvergenceTrace:
    entries: list[RiemannSumResult]
    target: float | None
    stopping_reason: str
    tolerance: float
    non_convergence: bool

    @property
    def final_value(self) -> float:
        return self.entries[-1].value

    def deltas(self) -> list[float]:
        vals = [e.value for e in self.entries]
        return [b - a for a, b in zip(vals, vals[1:])]

    def rows(self) -> list[tuple[int, float, float]]:
        """(n, value, delta) rows for CSV output; n is |K|^(1/d) for square
        grids, else |K|."""
        out = []
        prev = None
        for e in self.entries:
            orders = e.spec.orders
            n = orders[0] if len(set(orders)) == 1 else e.spec.size
            out.append((n, e.value, 0.0 if prev is None else e.value - prev))
            prev = e.value
        return out


def mahler_nd(
    f: LaurentPoly,
    schedule: list[GridSpec],
    tolerance: float = 1e-3,
    target: float | None = None,
) -> ConvergenceTrace:
    """Riemann sums along a schedule of strictly growing grids.

    The trace never asserts convergence: it reports the values, their
    successive differences, and flags non-convergence when the last step
    still moves more than ``tolerance``.
    """
    if f.is_zero:
        raise ValueError("Mahler measure of 0 is undefined")
    if not schedule:
        raise ValueError("schedule must be nonempty")
    sizes = [s.size for s in schedule]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("schedule must be strictly increasing in grid size")
    entries = [riemann_mahler(f, spec) for spec in schedule]
    if len(entries) >= 2:
        non_conv = abs(entries[-1].value - entries[-2].value) > tolerance
    else:
        non_conv = True
    return ConvergenceTrace(
        entries=entries,
        target=target,
        stopping_reason="schedule exhausted",
        tolerance=tolerance,
        non_convergence=non_conv,
    )


def torsion_aware_square_grids(
    f: LaurentPoly, candidates: list[int], probe_limit: int = 16
) -> list[GridSpec]:
    """Square-grid schedule filtered to orders coprime to the torsion found
    on small grids.

    Small square grids up to ``probe_limit`` are scanned for certified
    zeros; each zero's coordinate orders are collected, and candidate grid
    orders sharing a factor with any of them are dropped (they would hit
    the zero set of f head-on, as 3 | n does for 1 + u + v).
    """
    torsion: set[int] = set()
    for n in range(2, probe_limit + 1):
        ev = grid_eval(f, GridSpec((n,) * f.d))
        for idx in ev.zero_indices():
            orders = [n // math.gcd(n, k) if k else 1 for k in idx]
            torsion.add(math.lcm(*orders))
    torsion.discard(1)
    out = []
    for n in candidates:
        if all(math.gcd(n, t) == 1 for t in torsion):
            out.append(GridSpec((n,) * f.d))
    return out


@dataclass
class ProbeHit:
    index: tuple[int, ...]
    point: tuple[complex, ...]
    abs_value: float
    certified_zero: bool


def unitary_variety_probe(
    f: LaurentPoly, spec: GridSpec, threshold: float
) -> list[ProbeHit]:
    """All grid points with |f| <= threshold, each labelled with its exact
    zero-certification status.  Shows how close the grid comes to the zero
    set of f on the torus."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    ev = grid_eval(f, spec)
    hits = []
    flat_abs = abs(ev.values.reshape(-1))
    flat_mask = ev.zero_mask.reshape(-1)
    orders = spec.orders
    for flat in range(spec.size):
        if flat_mask[flat]:
            a = 0.0
        elif flat in ev.refined_logabs:
            a = math.exp(ev.refined_logabs[flat])
        else:
            a = float(flat_abs[flat])
        if a <= threshold:
            idx = []
            rem = flat
            for n in reversed(orders):
                idx.append(rem % n)
                rem //= n
            idx_t = tuple(reversed(idx))
            hits.append(
                ProbeHit(
                    index=idx_t,
                    point=spec.point_on_torus(idx_t),
                    abs_value=a,
                    certified_zero=bool(flat_mask[flat]),
                )
            )
    return hits


def lawton_slice(f: LaurentPoly, n: int) -> float:
    """Mahler measure of the one-variable slice f(u, u^n).

    The substitution v -> u^n maps the two-torus polynomial onto the
    subgroup {(s, s^n)}; as n grows these measures approach the
    two-variable measure."""
    if f.d != 2:
        raise ValueError("lawton_slice expects a two-variable polynomial")
    if n < 1:
        raise ValueError("n must be positive")
    terms: dict[tuple[int], int] = {}
    for (a, b), c in f.terms.items():
        e = (a + n * b,)
        terms[e] = terms.get(e, 0) + c
    sliced = LaurentPoly(1, terms)
    if sliced.is_zero:
        raise ValueError("slice f(u, u^n) is identically zero")
    poly, _shift = IntPoly.from_laurent(sliced)
    return mahler_1d(poly)
