"""Zero-dimensional algebraic Z^d-actions cut out by F_p polynomial
relations: exact window counts, cylinder measures, mixing defects and
bounded nonmixing-set searches.

Everything here is exact: ranks over F_p decide solution counts, cylinder
measures come out as rationals p^-k, and supports returned by the ideal
search are certified nonmixing (they really are supports of ideal
elements).  GF(2) work runs on bit-packed rows through the kernel backend;
other primes use a dense modular elimination.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .laurent import LaurentPoly, parse_poly
from .primes import is_prime

Point = tuple[int, ...]
Window = tuple[tuple[int, int], ...]  # inclusive (lo, hi) per dimension

MAX_HALO = 8
SEARCH_BUDGET = 5_000_000


class StabilizationError(RuntimeError):
    """Cylinder measure kept changing up to the halo budget."""


class RankBudgetError(RuntimeError):
    """Search space too large for the configured budget."""


@dataclass
class FpShiftSystem:
    p: int
    d: int
    generators: list[LaurentPoly]

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if not self.generators:
            raise ValueError("at least one defining relation is required")
        for g in self.generators:
            if g.is_zero:
                raise ValueError("generators must be nonzero")
            if g.d != self.d or g.p != self.p:
                raise ValueError("generator does not live in F_p[u_1..u_d]")

    @classmethod
    def from_json(cls, obj: dict) -> "FpShiftSystem":
        p, d = int(obj["p"]), int(obj["d"])
        gens = []
        for g in obj["generators"]:
            if isinstance(g, str):
                gens.append(parse_poly(g, d, p))
            else:
                gens.append(LaurentPoly(d, {tuple(t["e"]): t["c"] for t in g["terms"]}, p))
        return cls(p=p, d=d, generators=gens)

    def to_json(self) -> dict:
        from .laurent import format_poly

        return {"p": self.p, "d": self.d, "generators": [format_poly(g) for g in self.generators]}


def ledrappier_system() -> FpShiftSystem:
    return FpShiftSystem(p=2, d=2, generators=[parse_poly("1+u+v", 2, 2)])


# -- window geometry -----------------------------------------------------------


def square_window(n: int, d: int) -> Window:
    return tuple((0, n - 1) for _ in range(d))


def _cells(window: Window) -> list[Point]:
    ranges = [range(lo, hi + 1) for lo, hi in window]
    return [tuple(c) for c in itertools.product(*ranges)]


def _interior_translates(g: LaurentPoly, window: Window):
    """Translates t such that t + support(g) lies inside the window."""
    sup = list(g.terms)
    ranges = []
    for j, (lo, hi) in enumerate(window):
        mlo = min(m[j] for m in sup)
        mhi = max(m[j] for m in sup)
        ranges.append(range(lo - mlo, hi - mhi + 1))
    yield from itertools.product(*ranges)


def _boundary_translate_count(g: LaurentPoly, window: Window) -> int:
    """Translates whose support meets the window without fitting inside."""
    sup = list(g.terms)
    total = 1
    inside = 1
    for j, (lo, hi) in enumerate(window):
        mlo = min(m[j] for m in sup)
        mhi = max(m[j] for m in sup)
        touching = (hi - mlo) - (lo - mhi) + 1
        fitting = max((hi - mhi) - (lo - mlo) + 1, 0)
        total *= max(touching, 0)
        inside *= fitting
    return total - inside


def _constraint_rows(sys: FpShiftSystem, window: Window, index: dict[Point, int]):
    """Sparse rows (cell_index, coeff) of every fully interior relation."""
    rows = []
    for g in sys.generators:
        for t in _interior_translates(g, window):
            rows.append(
                [(index[tuple(a + b for a, b in zip(t, m))], c) for m, c in g.terms.items()]
            )
    return rows


# -- rank computations ---------------------------------------------------------


def _pack_rows_gf2(rows, n_cols: int, rhs: list[int] | None = None) -> np.ndarray:
    n_words = (n_cols + 1 + 63) >> 6 if rhs is not None else (n_cols + 63) >> 6
    mat = np.zeros((len(rows), max(n_words, 1)), dtype=np.uint64)
    for i, row in enumerate(rows):
        for j, c in row:
            if c & 1:
                mat[i, j >> 6] ^= np.uint64(1) << np.uint64(j & 63)
        if rhs is not None and rhs[i] & 1:
            mat[i, n_cols >> 6] ^= np.uint64(1) << np.uint64(n_cols & 63)
    return mat


def _rank_gf2(rows, n_cols: int) -> int:
    if not rows:
        return 0
    mat = _pack_rows_gf2(rows, n_cols)
    rank, _ = _kernels.gf2_rref(mat, n_cols)
    return rank


def _modp_rref(mat: np.ndarray, p: int, n_cols: int):
    """Dense RREF mod p over the first n_cols columns; extra columns ride
    along.  Returns (rank, pivots); mat is modified in place."""
    n_rows = mat.shape[0]
    rank = 0
    pivots = []
    for col in range(n_cols):
        if rank == n_rows:
            break
        nz = np.nonzero(mat[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            mat[[rank, piv]] = mat[[piv, rank]]
        inv = pow(int(mat[rank, col]), -1, p)
        mat[rank] = (mat[rank] * inv) % p
        hit = np.nonzero(mat[:, col])[0]
        hit = hit[hit != rank]
        if hit.size:
            mat[hit] = (mat[hit] - np.outer(mat[hit, col], mat[rank])) % p
        pivots.append(col)
        rank += 1
    return rank, pivots


def _rank_modp(rows, n_cols: int, p: int) -> int:
    if not rows:
        return 0
    mat = np.zeros((len(rows), n_cols), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, c in row:
            mat[i, j] = (mat[i, j] + c) % p
    rank, _ = _modp_rref(mat, p, n_cols)
    return rank


def _rank(sys_p: int, rows, n_cols: int) -> int:
    if sys_p == 2:
        return _rank_gf2(rows, n_cols)
    return _rank_modp(rows, n_cols, sys_p)


# -- window counts -------------------------------------------------------------


@dataclass
class WindowCount:
    window: Window
    free_dimension: int
    constraint_rank: int
    n_constraints: int
    # translates clipped by the window boundary; bounds how far the interior
    # count can sit from the projection count of the infinite system
    boundary_discrepancy_bound: int

    @property
    def solution_count_log_p(self) -> int:
        return self.free_dimension


def window_count(sys: FpShiftSystem, window: Window | int) -> WindowCount:
    """Exact solution count of the interior relations on a finite window:
    p^free_dimension solutions, free_dimension = cells - rank."""
    if isinstance(window, int):
        window = square_window(window, sys.d)
    cells = _cells(window)
    if not cells:
        raise ValueError("window is empty")
    index = {c: i for i, c in enumerate(cells)}
    rows = _constraint_rows(sys, window, index)
    rank = _rank(sys.p, rows, len(cells))
    bound = sum(_boundary_translate_count(g, window) for g in sys.generators)
    return WindowCount(
        window=window,
        free_dimension=len(cells) - rank,
        constraint_rank=rank,
        n_constraints=len(rows),
        boundary_discrepancy_bound=bound,
    )


@dataclass
class WindowEntropyTrace:
    rows: list[tuple[int, float]]  # (n, free_dimension * log p / n^d)
    expected_limit: float | None  # 0.0 for single-relation systems


def window_entropy_trace(sys: FpShiftSystem, n_list: list[int]) -> WindowEntropyTrace:
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing")
    rows = []
    for n in n_list:
        wc = window_count(sys, n)
        rows.append((n, wc.free_dimension * math.log(sys.p) / n**sys.d))
    limit = 0.0 if len(sys.generators) == 1 else None
    return WindowEntropyTrace(rows=rows, expected_limit=limit)


# -- cylinder measures ----------------------------------------------------------


CylinderSpec = dict  # Point -> value in F_p


@dataclass
class CylinderMeasure:
    value: Fraction
    stabilized_at_halo: int


def _measure_at_halo(
    sys: FpShiftSystem, cyl: CylinderSpec, halo: int, force_dense: bool = False
) -> Fraction:
    pts = list(cyl)
    window = tuple(
        (min(c[j] for c in pts) - halo, max(c[j] for c in pts) + halo)
        for j in range(sys.d)
    )
    cells = _cells(window)
    index = {c: i for i, c in enumerate(cells)}
    n_cols = len(cells)
    m_rows = _constraint_rows(sys, window, index)
    a_rows = [[(index[c], 1)] for c in pts]
    a_rhs = [int(v) % sys.p for v in cyl.values()]

    if sys.p == 2 and not force_dense:
        mat = _pack_rows_gf2(m_rows, n_cols) if m_rows else np.zeros((0, (n_cols + 63) >> 6), dtype=np.uint64)
        rank_m, pivots = _kernels.gf2_rref(mat, n_cols)
        amat = _pack_rows_gf2(a_rows, n_cols, rhs=a_rhs)
        # reduce the assignment rows by the relation row space
        for i, pc in enumerate(pivots):
            w, b = pc >> 6, np.uint64(pc & 63)
            hit = np.nonzero((amat[:, w] >> b) & np.uint64(1))[0]
            if hit.size:
                amat[hit, : mat.shape[1]] ^= mat[i]
        rank_extra, _ = _kernels.gf2_rref(amat, n_cols)
        # a row with empty coefficient part but a set RHS bit is contradictory
        rhs_w, rhs_b = n_cols >> 6, np.uint64(n_cols & 63)
        for i in range(rank_extra, amat.shape[0]):
            coeffs_zero = True
            for w in range(amat.shape[1]):
                word = int(amat[i, w])
                if w == rhs_w:
                    word &= ~(1 << int(rhs_b))
                if word:
                    coeffs_zero = False
                    break
            if coeffs_zero and (int(amat[i, rhs_w]) >> int(rhs_b)) & 1:
                return Fraction(0)
    else:
        full = np.zeros((len(m_rows) + len(a_rows), n_cols + 1), dtype=np.int64)
        for i, row in enumerate(m_rows):
            for j, c in row:
                full[i, j] = (full[i, j] + c) % sys.p
        for k, (row, rhs) in enumerate(zip(a_rows, a_rhs)):
            i = len(m_rows) + k
            for j, c in row:
                full[i, j] = c % sys.p
            full[i, n_cols] = rhs
        m_only = full[: len(m_rows), :n_cols].copy()
        rank_m, _ = _modp_rref(m_only, sys.p, n_cols)
        rank_all, _ = _modp_rref(full, sys.p, n_cols)
        for i in range(rank_all, full.shape[0]):
            if full[i, n_cols] % sys.p and not full[i, :n_cols].any():
                return Fraction(0)
        rank_extra = rank_all - rank_m

    return Fraction(1, sys.p**rank_extra)


def cylinder_measure(
    sys: FpShiftSystem, cyl: CylinderSpec, halo: int = 0, max_halo: int = MAX_HALO
) -> CylinderMeasure:
    """Haar measure of a finite cylinder, exact.

    Computed as the ratio of solution counts on a haloed window; accepted
    once three consecutive halos give the same rational.  Non-stabilization
    is an error, never a guess.
    """
    if not cyl:
        raise ValueError("cylinder must constrain at least one coordinate")
    if halo < 0:
        raise ValueError("halo must be nonnegative")
    vals = {}
    h = halo
    while h + 2 <= max_halo + 2:
        for hh in (h, h + 1, h + 2):
            if hh not in vals:
                vals[hh] = _measure_at_halo(sys, cyl, hh)
        if vals[h] == vals[h + 1] == vals[h + 2]:
            return CylinderMeasure(value=vals[h], stabilized_at_halo=h)
        h += 1
    raise StabilizationError(
        f"cylinder measure did not stabilize within halo budget {max_halo}"
    )


# -- mixing defects --------------------------------------------------------------


@dataclass
class MixingDefectTrace:
    shape: list[Point]
    k_list: list[int]
    measured: list[Fraction]
    product_target: Fraction
    defects: list[Fraction]


def mixing_defect(
    sys: FpShiftSystem,
    shape: list[Point],
    cylinders: dict[Point, CylinderSpec] | CylinderSpec,
    k_list: list[int],
) -> MixingDefectTrace:
    """Exact mu(cap_{n in F} alpha^{k n} B_n) against prod mu(B_n).

    alpha^m carries the cylinder at coordinates c to coordinates c + m (the
    shift moves configurations the opposite way).  Conflicting merged
    assignments give measure zero outright.
    """
    if not shape:
        raise ValueError("shape must be nonempty")
    if not isinstance(next(iter(cylinders.values())), dict):
        cylinders = {n: dict(cylinders) for n in shape}  # same cylinder everywhere
    target = Fraction(1)
    for n in shape:
        target *= cylinder_measure(sys, cylinders[n]).value
    measured = []
    for k in k_list:
        merged: CylinderSpec = {}
        conflict = False
        for n in shape:
            for c, v in cylinders[n].items():
                coord = tuple(a + k * b for a, b in zip(c, n))
                if merged.get(coord, v) != v:
                    conflict = True
                    break
                merged[coord] = v
            if conflict:
                break
        measured.append(Fraction(0) if conflict else cylinder_measure(sys, merged).value)
    defects = [m - target for m in measured]
    return MixingDefectTrace(
        shape=list(shape),
        k_list=list(k_list),
        measured=measured,
        product_target=target,
        defects=defects,
    )


# -- ideal support search ----------------------------------------------------------


def frobenius_dilate(f: LaurentPoly, k: int) -> LaurentPoly:
    """f^(p^k) in characteristic p: the support dilates by p^k and the
    coefficients are fixed (Fermat)."""
    if f.p is None:
        raise ValueError("frobenius_dilate needs an F_p polynomial")
    if k < 0:
        raise ValueError("k must be >= 0")
    scale = f.p**k
    return LaurentPoly(f.d, {tuple(scale * e for e in m): c for m, c in f.terms.items()}, f.p)


def ideal_support_search(
    sys: FpShiftSystem, box: Window | int, max_support: int, budget: int = SEARCH_BUDGET
) -> list[tuple[Point, ...]]:
    """All supports (up to translation) of ideal elements with support
    inside the box and cardinality <= max_support.

    The ideal elements seen through a box are the row space of all interior
    generator translates; membership of a candidate combination is a
    syndrome check against a nullspace basis of that row space.  Every
    returned support is certified nonmixing for the action.
    """
    if isinstance(box, int):
        box = square_window(box, sys.d)
    if max_support < 1:
        raise ValueError("max_support must be >= 1")
    cells = _cells(box)
    n = len(cells)
    work = sum(math.comb(n, k) * (sys.p - 1) ** max(k - 1, 0) for k in range(1, max_support + 1))
    if work > budget:
        raise RankBudgetError(f"support search needs ~{work} checks, budget is {budget}")
    index = {c: i for i, c in enumerate(cells)}
    rows = _constraint_rows(sys, box, index)

    found: set[tuple[Point, ...]] = set()

    def canon(support_idx) -> tuple[Point, ...]:
        pts = [cells[i] for i in support_idx]
        mins = [min(pt[j] for pt in pts) for j in range(sys.d)]
        return tuple(sorted(tuple(a - b for a, b in zip(pt, mins)) for pt in pts))

    if sys.p == 2:
        mat = _pack_rows_gf2(rows, n)
        basis = _kernels.gf2_nullspace(mat, n)
        syn = [0] * n
        for j, vec in enumerate(basis):
            for cell in vec:
                syn[cell] |= 1 << j
        # membership: xor of syndromes over the support must vanish
        if max_support >= 1:
            for i in range(n):
                if syn[i] == 0:
                    found.add(canon([i]))
        if max_support >= 2:
            by_val: dict[int, list[int]] = {}
            for i, s in enumerate(syn):
                by_val.setdefault(s, []).append(i)
            for positions in by_val.values():
                for a in range(len(positions)):
                    for b in range(a + 1, len(positions)):
                        found.add(canon([positions[a], positions[b]]))
        if max_support >= 3:
            by_val = {}
            for i, s in enumerate(syn):
                by_val.setdefault(s, []).append(i)
            for i in range(n):
                for j in range(i + 1, n):
                    need = syn[i] ^ syn[j]
                    for k in by_val.get(need, ()):
                        if k > j:
                            found.add(canon([i, j, k]))
        if max_support >= 4:
            raise RankBudgetError("support search implemented for sizes up to 3")
    else:
        mat = np.zeros((len(rows), n), dtype=np.int64)
        for i, row in enumerate(rows):
            for j, c in row:
                mat[i, j] = (mat[i, j] + c) % sys.p
        rank, pivots = _modp_rref(mat, sys.p, n)
        pivot_set = set(pivots)
        basis = []
        for free in range(n):
            if free in pivot_set:
                continue
            vec = np.zeros(n, dtype=np.int64)
            vec[free] = 1
            for i, pc in enumerate(pivots):
                vec[pc] = (-mat[i, free]) % sys.p
            basis.append(vec)
        syn_mat = np.array([b for b in basis], dtype=np.int64)  # (q, n)
        q = syn_mat.shape[0] if basis else 0

        def syndrome(i):
            return syn_mat[:, i] if q else np.zeros(0, dtype=np.int64)

        units = range(1, sys.p)
        if max_support >= 1:
            for i in range(n):
                if not syndrome(i).any():
                    found.add(canon([i]))
        if max_support >= 2:
            for i in range(n):
                si = syndrome(i)
                for j in range(i + 1, n):
                    sj = syndrome(j)
                    if any(not ((si + c * sj) % sys.p).any() for c in units):
                        found.add(canon([i, j]))
        if max_support >= 3:
            for i in range(n):
                si = syndrome(i)
                for j in range(i + 1, n):
                    sj = syndrome(j)
                    for k in range(j + 1, n):
                        sk = syndrome(k)
                        if any(
                            not ((si + c1 * sj + c2 * sk) % sys.p).any()
                            for c1 in units
                            for c2 in units
                        ):
                            found.add(canon([i, j, k]))
        if max_support >= 4:
            raise RankBudgetError("support search implemented for sizes up to 3")

    return sorted(found, key=lambda s: (len(s), s))
