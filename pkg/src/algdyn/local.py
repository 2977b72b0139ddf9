"""One-variable Mahler measure by Jensen's formula, p-adic Mahler measures
by Newton polygons, and the local-to-global entropy of solenoid
automorphisms given by rational matrices.

The archimedean side classifies every root against the unit circle with a
containment radius from simultaneous (Aberth) refinement in extended
precision; the finite sides are exact rational data (a rational multiple of
log p per prime).  Roots whose modulus cannot be separated from 1 at
precision 2^-200 are treated as lying on the circle; integer polynomials of
the degrees accepted here do not have off-circle roots that close.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .intlinalg import charpoly_int
from .primes import factorize

MAX_DEGREE = 64
ON_CIRCLE_PREC = 200  # bits: straddling 1 below this radius means "on"
_MAX_PREC = 2048


class RootRefinementError(RuntimeError):
    def __init__(self, achieved: float):
        super().__init__(f"root refinement stalled at accuracy ~{achieved:.3e}")
        self.achieved = achieved


class IntPoly:
    """Dense integer polynomial c_0 + c_1 u + ... + c_r u^r with c_r != 0."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = cs

    @classmethod
    def from_laurent(cls, f) -> tuple["IntPoly", int]:
        """Write a d=1 Laurent polynomial as u^shift * IntPoly."""
        if f.d != 1 or f.p is not None:
            raise ValueError("expected a one-variable integer Laurent polynomial")
        if f.is_zero:
            return cls([]), 0
        lo = min(m[0] for m in f.terms)
        hi = max(m[0] for m in f.terms)
        cs = [0] * (hi - lo + 1)
        for (e,), c in f.terms.items():
            cs[e - lo] = c
        return cls(cs), lo

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def __eq__(self, other):
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"IntPoly({self.coeffs})"


@dataclass
class RootInfo:
    value: complex
    multiplicity: int
    side: str  # 'inside' | 'on' | 'outside'
    modulus: float
    radius: float  # certified containment radius around ``value``


# -- squarefree decomposition over Q ------------------------------------------


def _q_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _q_deriv(p):
    return _q_trim([i * c for i, c in enumerate(p)][1:])


def _q_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv = 1 / b[-1]
    for i in range(len(a) - 1, len(b) - 2, -1):
        c = a[i] * inv
        if c == 0:
            continue
        q[i - len(b) + 1] = c
        for j, bc in enumerate(b):
            a[i - len(b) + 1 + j] -= c * bc
    return q, _q_trim(a)


def _q_gcd(a, b):
    a, b = list(a), list(b)
    while b:
        _, r = _q_divmod(a, b)
        a, b = b, r
    if a:
        inv = 1 / a[-1]
        a = [c * inv for c in a]
    return a


def _primitive_int(p) -> list[int]:
    if not p:
        return []
    denom = math.lcm(*(c.denominator for c in p))
    ints = [int(c * denom) for c in p]
    g = math.gcd(*(abs(c) for c in ints))
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def squarefree_decomposition(f: IntPoly) -> list[tuple[list[int], int]]:
    """Yun's algorithm: f = lc * prod g_i^i with the g_i squarefree and
    pairwise coprime.  Returns [(g_i coefficients, i), ...]."""
    fq = [Fraction(c) for c in f.coeffs]
    if len(fq) <= 1:
        return []
    fp = _q_deriv(fq)
    a = _q_gcd(fq, fp)
    b, r = _q_divmod(fq, a)
    assert not r
    c, r = _q_divmod(fp, a)
    assert not r
    d = _q_trim([x - y for x, y in zip_longest_frac(c, _q_deriv(b))])
    out = []
    i = 1
    while len(b) > 1:
        g = _q_gcd(b, d)
        if len(g) > 1:
            out.append((_primitive_int(g), i))
        b, r = _q_divmod(b, g)
        assert not r
        c, r = _q_divmod(d, g)
        assert not r
        d = _q_trim([x - y for x, y in zip_longest_frac(c, _q_deriv(b))])
        i += 1
    return out


def zip_longest_frac(a, b):
    n = max(len(a), len(b))
    for i in range(n):
        yield (a[i] if i < len(a) else Fraction(0)), (b[i] if i < len(b) else Fraction(0))


# -- Aberth refinement ---------------------------------------------------------


def _initial_guesses(coeffs: list[int]) -> list[complex]:
    deg = len(coeffs) - 1
    try:
        arr = np.array(coeffs[::-1], dtype=float)
        if np.all(np.isfinite(arr)):
            roots = np.roots(arr)
            if len(roots) == deg and np.all(np.isfinite(roots)):
                return [complex(z) for z in roots]
    except (ValueError, np.linalg.LinAlgError, OverflowError):
        pass
    # Cauchy-circle fallback
    radius = 1.0 + max(abs(c) for c in coeffs[:-1]) / abs(coeffs[-1]) if deg else 1.0
    return [
        radius * complex(math.cos(2 * math.pi * (k + 0.25) / deg), math.sin(2 * math.pi * (k + 0.25) / deg))
        for k in range(deg)
    ]


def _horner_pair(coeffs, z):
    f = mp.mpc(0)
    fp = mp.mpc(0)
    for c in reversed(coeffs):
        fp = fp * z + f
        f = f * z + c
    return f, fp


def _aberth(coeffs: list[int], prec: int, max_iter: int = 500):
    """Simultaneous refinement of all roots of a squarefree integer
    polynomial at the given binary precision."""
    deg = len(coeffs) - 1
    if deg == 0:
        return []
    with mp.workprec(prec + 60):
        z = [mp.mpc(w) for w in _initial_guesses(coeffs)]
        # split coincident starting points
        for i in range(deg):
            for j in range(i):
                if z[i] == z[j]:
                    z[i] += mp.mpc(1e-3, 1e-3) * (i + 1)
        target = mp.mpf(2) ** (-prec)
        last = mp.inf
        for _ in range(max_iter):
            worst = mp.mpf(0)
            for i in range(deg):
                f, fp = _horner_pair(coeffs, z[i])
                if fp == 0:
                    z[i] += target
                    worst = mp.mpf(1)
                    continue
                w = f / fp
                s = mp.mpc(0)
                for j in range(deg):
                    if j != i:
                        s += 1 / (z[i] - z[j])
                denom = 1 - w * s
                delta = w if denom == 0 else w / denom
                z[i] -= delta
                scale = 1 + abs(z[i])
                worst = max(worst, abs(delta) / scale)
            if worst < target:
                return z
            last = worst
        raise RootRefinementError(float(last))


def _classified_roots(f: IntPoly, prec: int = 256):
    """All roots of f with multiplicity, modulus and circle classification.

    Each approximation carries the containment radius deg*|f/f'| (for the
    squarefree factor), which certifies that a true root lies that close.
    Precision escalates until every modulus is separated from 1 or the
    radius drops below 2^-ON_CIRCLE_PREC.
    """
    if f.is_zero or f.degree < 1:
        return []
    out = []
    for factor, mult in squarefree_decomposition(f):
        deg = len(factor) - 1
        p = prec
        while True:
            roots = _aberth(factor, p)
            with mp.workprec(p + 60):
                infos = []
                ok = True
                for z in roots:
                    fv, fpv = _horner_pair(factor, z)
                    radius = deg * abs(fv) / abs(fpv) if fpv != 0 else mp.inf
                    modulus = abs(z)
                    if modulus - radius > 1:
                        side = "outside"
                    elif modulus + radius < 1:
                        side = "inside"
                    elif radius < mp.mpf(2) ** (-ON_CIRCLE_PREC):
                        side = "on"
                    else:
                        ok = False
                        break
                    infos.append((z, modulus, radius, side))
                if ok:
                    for z, modulus, radius, side in infos:
                        out.append(
                            RootInfo(
                                value=complex(z),
                                multiplicity=mult,
                                side=side,
                                modulus=float(modulus),
                                radius=float(radius),
                            )
                        )
                        # keep the high-precision modulus for the measure
                        out[-1]._mp_log_modulus = mp.log(modulus)  # type: ignore[attr-defined]
                    break
            p *= 2
            if p > _MAX_PREC:
                raise RootRefinementError(2.0 ** -(p // 2))
    return out


def roots_with_modulus_class(f: IntPoly, tol: float = 1e-40) -> list[RootInfo]:
    """Roots of f with multiplicity, classified against the unit circle."""
    if f.is_zero:
        raise ValueError("zero polynomial has no root data")
    if f.degree > MAX_DEGREE:
        raise ValueError(f"degree {f.degree} exceeds the supported bound {MAX_DEGREE}")
    prec = max(256, int(-math.log2(tol)) + 64)
    return _classified_roots(f, prec)


@dataclass
class MahlerResult:
    value: float
    error_bound: float
    roots: list[RootInfo]


def mahler_1d_report(f: IntPoly) -> MahlerResult:
    """Logarithmic Mahler measure of a one-variable integer polynomial:
    log|leading| plus log-moduli of the roots outside the unit circle."""
    if f.is_zero:
        raise ValueError("Mahler measure of the zero polynomial is undefined")
    roots = roots_with_modulus_class(f)
    with mp.workprec(300):
        total = mp.log(abs(f.leading))
        err = mp.mpf(0)
        for r in roots:
            if r.side == "outside":
                total += r.multiplicity * r._mp_log_modulus  # type: ignore[attr-defined]
                err += r.multiplicity * mp.mpf(r.radius) / mp.mpf(r.modulus)
        return MahlerResult(value=float(total), error_bound=float(err) + 1e-15, roots=roots)


def mahler_1d(f: IntPoly) -> float:
    return mahler_1d_report(f).value


# -- rational matrices and their local data -----------------------------------


class RationalMatrix:
    __slots__ = ("entries",)

    def __init__(self, entries):
        rows = [[Fraction(x) for x in row] for row in entries]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        self.entries = rows

    @classmethod
    def from_strings(cls, rows: list[list[str]]) -> "RationalMatrix":
        return cls([[Fraction(s) for s in row] for row in rows])

    @property
    def size(self) -> int:
        return len(self.entries)

    def __repr__(self):
        return f"RationalMatrix({[[str(x) for x in row] for row in self.entries]})"


@dataclass
class CharPolyData:
    char_poly: list[Fraction]  # monic, low degree first
    clearing_s: int
    cleared: IntPoly  # s * char_poly


def char_poly_data(A: RationalMatrix) -> CharPolyData:
    """Exact characteristic polynomial of a rational matrix together with
    the smallest positive integer s making s*chi integral."""
    r = A.size
    q = math.lcm(*(x.denominator for row in A.entries for x in row)) if r else 1
    B = [[int(x * q) for x in row] for row in A.entries]
    chi_b = charpoly_int(B)  # monic, det(uI - B)
    # chi_A(u) = q^-r * chi_B(q u)
    chi = [Fraction(chi_b[i]) * Fraction(q) ** (i - r) for i in range(r + 1)]
    s = math.lcm(*(c.denominator for c in chi))
    cleared = IntPoly([int(c * s) for c in chi])
    return CharPolyData(char_poly=chi, clearing_s=s, cleared=cleared)


@dataclass
class NewtonPolygonSlopes:
    """Slope data of the p-adic valuation polygon.

    Slopes are oriented as root valuations: a pair (v, m) means m roots of
    p-adic valuation v.  Roots at 0 (valuation +infinity) are counted
    separately in ``zero_root_multiplicity``.
    """

    prime: int
    slopes: list[tuple[Fraction, int]]
    zero_root_multiplicity: int = 0

    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.slopes) + self.zero_root_multiplicity


def _vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def newton_polygon(f, p: int) -> NewtonPolygonSlopes:
    """Valuation polygon of an integer polynomial (or CharPolyData) at p."""
    if isinstance(f, CharPolyData):
        f = f.cleared
    if f.is_zero:
        raise ValueError("Newton polygon of the zero polynomial is undefined")
    cs = f.coeffs
    k = next(i for i, c in enumerate(cs) if c != 0)
    pts = [(i - k, _vp(c, p)) for i, c in enumerate(cs) if c != 0]
    hull = _lower_hull(pts)
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        hull_slope = Fraction(y2 - y1, x2 - x1)
        slopes.append((-hull_slope, x2 - x1))
    return NewtonPolygonSlopes(prime=p, slopes=slopes, zero_root_multiplicity=k)


def _lower_hull(pts):
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop middle point if it lies on or above the new segment
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


@dataclass
class PadicMahler:
    prime: int
    multiplier: Fraction  # exact rational: m_p = multiplier * log p
    value: float


def padic_mahler(f, p: int) -> PadicMahler:
    """p-adic logarithmic Mahler measure: sum of log|root|_p over roots of
    p-adic modulus > 1, read off the valuation polygon."""
    poly = newton_polygon(f, p)
    multiplier = Fraction(0)
    for v, m in poly.slopes:
        if v < 0:
            multiplier += -v * m
    return PadicMahler(prime=p, multiplier=multiplier, value=float(multiplier) * math.log(p))


@dataclass
class LocalEntropyReport:
    """Entropy of a rational matrix on the corresponding solenoid, split
    into one contribution per place of Q."""

    archimedean: float
    finite: dict[int, PadicMahler]
    clearing_s: int
    total: float

    def places(self) -> dict:
        out = {"inf": self.archimedean}
        for p, res in sorted(self.finite.items()):
            out[p] = res.value
        return out


def solenoid_entropy(A: RationalMatrix) -> LocalEntropyReport:
    """Entropy via the sum of local Mahler measures of the characteristic
    polynomial: archimedean root data plus one Newton polygon per prime
    dividing the clearing integer."""
    cpd = char_poly_data(A)
    if cpd.char_poly[0] == 0:
        raise ValueError("matrix is singular; solenoid entropy needs an automorphism")
    with mp.workprec(300):
        arch_mp = mp.mpf(0)
        for r in roots_with_modulus_class(cpd.cleared):
            if r.side == "outside":
                arch_mp += r.multiplicity * r._mp_log_modulus  # type: ignore[attr-defined]
    arch = float(arch_mp)
    finite = {}
    for p in sorted(factorize(cpd.clearing_s)):
        res = padic_mahler(cpd, p)
        if res.multiplier:
            finite[p] = res
    total = arch + sum(r.value for r in finite.values())
    return LocalEntropyReport(
        archimedean=arch, finite=finite, clearing_s=cpd.clearing_s, total=total
    )
