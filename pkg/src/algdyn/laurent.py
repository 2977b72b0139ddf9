"""Exact Laurent polynomials over Z and F_p, and their evaluation on
roots-of-unity grids.

A polynomial in d commuting variables is stored sparsely as a map from
exponent vectors (length-d integer tuples, negative entries allowed) to
nonzero coefficients.  Dense arrays are materialized only inside
``grid_eval``, where exponents are wrapped modulo the grid orders and the
values on the whole grid come out of one multidimensional FFT.

Points of the grid where the polynomial truly vanishes are *certified*
(exact cyclotomic arithmetic, with a rigorous multiprecision prescreen for
large conductors); floating-point smallness alone never marks a zero.
"""

from __future__ import annotations

import math
import re as _re
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import cyclotomic as _cyc

Monomial = tuple[int, ...]

DEFAULT_GRID_BUDGET = 1 << 29  # bytes for the dense value array
# |value| below l1_norm * this ratio triggers exact zero certification
CERT_THRESHOLD_RATIO = 1e-6
MAX_CERT_CANDIDATES = 4096
DEFAULT_SLAB = 1 << 16


class RingMismatchError(ValueError):
    """Mixed dimensions or coefficient rings in a binary operation."""


class PolySyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class GridBudgetError(RuntimeError):
    """Requested grid exceeds the configured memory budget."""


class CertificationBudgetError(RuntimeError):
    """Too many near-zero grid points to certify exactly."""


class LaurentPoly:
    """Finitely supported exponent-vector -> coefficient map.

    ``p`` is None for integer coefficients, otherwise the prime of F_p
    (coefficients normalized to 1..p-1).
    """

    __slots__ = ("d", "p", "terms")

    def __init__(self, d: int, terms: dict[Monomial, int], p: int | None = None):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        if p is not None and p < 2:
            raise ValueError("characteristic must be a prime >= 2")
        self.d = d
        self.p = p
        norm: dict[Monomial, int] = {}
        for m, c in terms.items():
            if len(m) != d:
                raise ValueError(f"exponent vector {m} has length != {d}")
            if p is not None:
                c %= p
            if c:
                m = tuple(int(e) for e in m)
                norm[m] = norm.get(m, 0) + c
                if p is not None:
                    norm[m] %= p
                if not norm[m]:
                    del norm[m]
        self.terms = norm

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, d: int, p: int | None = None) -> "LaurentPoly":
        return cls(d, {}, p)

    @classmethod
    def constant(cls, d: int, c: int, p: int | None = None) -> "LaurentPoly":
        return cls(d, {(0,) * d: c}, p)

    @classmethod
    def monomial(cls, exponents: Monomial, c: int = 1, p: int | None = None) -> "LaurentPoly":
        return cls(len(exponents), {tuple(exponents): c}, p)

    @classmethod
    def from_json(cls, obj: dict) -> "LaurentPoly":
        ring = obj.get("ring", "Z")
        p = None if ring in ("Z", None) else int(ring[1:] if isinstance(ring, str) and ring.startswith("F") else ring)
        terms = {tuple(t["e"]): int(t["c"]) for t in obj["terms"]}
        return cls(int(obj["d"]), terms, p)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "ring": "Z" if self.p is None else f"F{self.p}",
            "terms": [{"e": list(m), "c": c} for m, c in sorted(self.terms.items())],
        }

    # -- basic queries ---------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> set[Monomial]:
        return set(self.terms)

    def l1_norm(self) -> int:
        return sum(abs(c) for c in self.terms.values())

    def constant_coeff(self) -> int:
        return self.terms.get((0,) * self.d, 0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LaurentPoly)
            and self.d == other.d
            and self.p == other.p
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.d, self.p, frozenset(self.terms.items())))

    def _check_compatible(self, other: "LaurentPoly") -> None:
        if self.d != other.d:
            raise RingMismatchError(f"dimension mismatch: {self.d} vs {other.d}")
        if self.p != other.p:
            raise RingMismatchError(f"coefficient ring mismatch: {self.p} vs {other.p}")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check_compatible(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return LaurentPoly(self.d, terms, self.p)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.d, {m: -c for m, c in self.terms.items()}, self.p)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check_compatible(other)
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return LaurentPoly(self.d, out, self.p)

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            raise ValueError("negative powers are not defined for polynomials")
        acc = LaurentPoly.constant(self.d, 1, self.p)
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base if k > 1 else base
            k >>= 1
        return acc

    def scale(self, c: int) -> "LaurentPoly":
        return LaurentPoly(self.d, {m: c * v for m, v in self.terms.items()}, self.p)

    def shift(self, m: Monomial) -> "LaurentPoly":
        """Multiply by the monomial u^m."""
        return LaurentPoly(
            self.d, {tuple(a + b for a, b in zip(mm, m)): c for mm, c in self.terms.items()}, self.p
        )

    def involute(self) -> "LaurentPoly":
        """u_i -> u_i^{-1}: negate every exponent vector."""
        return LaurentPoly(self.d, {tuple(-e for e in m): c for m, c in self.terms.items()}, self.p)

    def evaluate(self, point: tuple[complex, ...]) -> complex:
        """Direct evaluation at a point of (C*)^d."""
        if len(point) != self.d:
            raise ValueError("point has wrong dimension")
        acc = 0j
        for m, c in self.terms.items():
            term = complex(c)
            for z, e in zip(point, m):
                term *= z**e
            acc += term
        return acc

    def __repr__(self) -> str:
        ring = "Z" if self.p is None else f"F{self.p}"
        return f"LaurentPoly(d={self.d}, {ring}, {format_poly(self)!r})"


# -- text format ------------------------------------------------------------


def variables_for(d: int) -> list[str]:
    if d == 1:
        return ["u"]
    if d == 2:
        return ["u", "v"]
    if d == 3:
        return ["u", "v", "w"]
    return [f"u{i}" for i in range(1, d + 1)]


_TOKEN = _re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z]\w*)|(?P<op>[-+*^()]))")


def parse_poly(text: str, d: int, p: int | None = None) -> LaurentPoly:
    """Parse the textual grammar: terms joined by + or -, each term an
    optional integer coefficient times a product of ``var[^exp]`` factors.

    Raises PolySyntaxError with the offending position.
    """
    names = {name: i for i, name in enumerate(variables_for(d))}
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip():
                raise PolySyntaxError(f"unexpected character {text[pos]!r}", pos)
            break
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()

    terms: dict[Monomial, int] = {}
    i = 0

    def peek(k: int = 0):
        return tokens[i + k] if i + k < len(tokens) else (None, None, len(text))

    def parse_signed_int() -> int:
        nonlocal i
        sign = 1
        kind, val, at = peek()
        while kind == "op" and val in "+-":
            if val == "-":
                sign = -sign
            i += 1
            kind, val, at = peek()
        if kind != "int":
            raise PolySyntaxError("expected integer exponent", at)
        i += 1
        return sign * int(val)

    while i < len(tokens):
        sign = 1
        kind, val, at = peek()
        while kind == "op" and val in "+-":
            if val == "-":
                sign = -sign
            i += 1
            kind, val, at = peek()
        if kind is None:
            raise PolySyntaxError("dangling sign", at)

        coeff = None
        if kind == "int":
            coeff = int(val)
            i += 1
            kind, val, at = peek()
            if kind == "op" and val == "*":
                i += 1
                kind, val, at = peek()

        exps = [0] * d
        saw_var = False
        while True:
            kind, val, at = peek()
            if kind == "op" and val == "*":
                i += 1
                continue
            if kind != "name":
                break
            if val not in names:
                raise PolySyntaxError(
                    f"unknown variable {val!r} (expected {', '.join(names)})", at
                )
            var = names[val]
            i += 1
            saw_var = True
            e = 1
            kind, val, at = peek()
            if kind == "op" and val == "^":
                i += 1
                e = parse_signed_int()
            exps[var] += e

        if coeff is None:
            if not saw_var:
                raise PolySyntaxError("expected coefficient or variable", at)
            coeff = 1
        m = tuple(exps)
        terms[m] = terms.get(m, 0) + sign * coeff

    if p is not None:
        for m in list(terms):
            terms[m] %= p
    return LaurentPoly(d, terms, p)


def format_poly(f: LaurentPoly) -> str:
    if f.is_zero:
        return "0"
    names = variables_for(f.d)
    parts = []
    for m, c in sorted(f.terms.items()):
        factors = []
        for name, e in zip(names, m):
            if e == 1:
                factors.append(name)
            elif e != 0:
                factors.append(f"{name}^{e}")
        body = "*".join(factors)
        if not body:
            body = str(abs(c))
        elif abs(c) != 1:
            body = f"{abs(c)}*{body}"
        parts.append(("-" if c < 0 else "+", body))
    head_sign, head = parts[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# -- roots-of-unity grids -----------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Finite subgroup of the d-torus: product of cyclic groups of the
    given orders."""

    orders: tuple[int, ...]

    def __post_init__(self):
        if not self.orders or any(n < 1 for n in self.orders):
            raise ValueError("grid orders must be positive")
        object.__setattr__(self, "orders", tuple(int(n) for n in self.orders))

    @property
    def d(self) -> int:
        return len(self.orders)

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @property
    def lcm(self) -> int:
        return math.lcm(*self.orders)

    def points(self) -> Iterator[tuple[int, ...]]:
        yield from np.ndindex(*self.orders)

    def point_on_torus(self, idx: tuple[int, ...]) -> tuple[complex, ...]:
        return tuple(
            complex(np.exp(2j * np.pi * k / n)) for k, n in zip(idx, self.orders)
        )


@dataclass
class GridEvaluation:
    """Values of an integer Laurent polynomial on a GridSpec, with a mask
    of certified zeros and high-accuracy corrections for near-zero points."""

    spec: GridSpec
    values: np.ndarray
    zero_mask: np.ndarray
    # flat index -> accurate log|f| for non-certified points whose FFT value
    # was too small to trust
    refined_logabs: dict[int, float] = field(default_factory=dict)
    slab_size: int = DEFAULT_SLAB
    n_candidates: int = 0

    @property
    def n_certified_zeros(self) -> int:
        return int(self.zero_mask.sum())

    def zero_indices(self) -> list[tuple[int, ...]]:
        return [tuple(int(i) for i in idx) for idx in np.argwhere(self.zero_mask)]


def grid_eval(
    f: LaurentPoly,
    spec: GridSpec,
    memory_budget: int = DEFAULT_GRID_BUDGET,
    slab_size: int = DEFAULT_SLAB,
) -> GridEvaluation:
    """Evaluate f at every point of the grid via a multidimensional FFT.

    values[k] = f(exp(2*pi*i*k_1/n_1), ..., exp(2*pi*i*k_d/n_d)).

    Exponents are reduced mod the grid orders with coefficient accumulation
    before the transform, which is exact on the grid.  Points whose float
    modulus is suspiciously small are settled exactly: certified zeros go in
    ``zero_mask``; certified non-zeros get an accurate log-modulus in
    ``refined_logabs``.
    """
    if f.p is not None:
        raise ValueError("grid evaluation is defined for integer coefficients")
    if f.d != spec.d:
        raise RingMismatchError(f"polynomial dimension {f.d} != grid dimension {spec.d}")
    need = spec.size * 16
    if need > memory_budget:
        raise GridBudgetError(
            f"grid of {spec.size} points needs {need} bytes, budget is {memory_budget}"
        )

    arr = np.zeros(spec.orders, dtype=np.complex128)
    for m, c in f.terms.items():
        idx = tuple(e % n for e, n in zip(m, spec.orders))
        arr[idx] += c
    values = np.fft.ifftn(arr) * spec.size

    zero_mask = np.zeros(spec.orders, dtype=bool)
    refined: dict[int, float] = {}
    n_candidates = 0
    l1 = f.l1_norm()
    if l1 > 0:
        tau = l1 * CERT_THRESHOLD_RATIO
        flat_abs = np.abs(values).reshape(-1)
        candidates = np.nonzero(flat_abs <= tau)[0]
        n_candidates = int(candidates.size)
        if n_candidates > MAX_CERT_CANDIDATES:
            raise CertificationBudgetError(
                f"{n_candidates} near-zero grid points exceed the certification "
                f"budget of {MAX_CERT_CANDIDATES}"
            )
        flat_mask = zero_mask.reshape(-1)
        for flat in candidates:
            idx = np.unravel_index(int(flat), spec.orders)
            idx = tuple(int(k) for k in idx)
            is_zero, logabs = _cyc.certify_point(f, spec.orders, idx)
            if is_zero:
                flat_mask[flat] = True
            else:
                refined[int(flat)] = logabs
    else:
        zero_mask[:] = True

    return GridEvaluation(
        spec=spec,
        values=values,
        zero_mask=zero_mask,
        refined_logabs=refined,
        slab_size=slab_size,
        n_candidates=n_candidates,
    )
