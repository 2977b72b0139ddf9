"""Exact matrix computations: big-integer determinants (Bareiss),
integer matrix powers, and characteristic polynomials over Q.

Matrices are plain lists of lists; entries are Python ints or Fractions.
"""

from __future__ import annotations

from fractions import Fraction

IntMatrix = list[list[int]]


def identity(r: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(r)] for i in range(r)]


def mat_mul(a, b):
    n, m, k = len(a), len(b[0]), len(b)
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_pow(a: IntMatrix, n: int) -> IntMatrix:
    if n < 0:
        raise ValueError("negative matrix powers not supported here")
    result = identity(len(a))
    base = [row[:] for row in a]
    while n:
        if n & 1:
            result = mat_mul(result, base)
        n >>= 1
        if n:
            base = mat_mul(base, base)
    return result


def bareiss_det(mat: IntMatrix) -> int:
    """Fraction-free determinant of an integer matrix (Bareiss).

    All intermediate divisions are exact; works for any size limited only by
    big-integer growth.
    """
    a = [row[:] for row in mat]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def charpoly_int(mat: IntMatrix) -> list[int]:
    """Characteristic polynomial det(uI - B) of an integer matrix, exact.

    Evaluates the Bareiss determinant at r+1 integer points and interpolates;
    the result is monic with integer coefficients (returned low degree first).
    """
    r = len(mat)
    if r == 0:
        return [1]
    xs = list(range(r + 1))
    ys = []
    for x in xs:
        shifted = [[(x if i == j else 0) - mat[i][j] for j in range(r)] for i in range(r)]
        ys.append(bareiss_det(shifted))
    coeffs = _interpolate_int(xs, ys)
    assert len(coeffs) == r + 1 and coeffs[-1] == 1, "charpoly must be monic"
    return coeffs


def _interpolate_int(xs: list[int], ys: list[int]) -> list[int]:
    """Lagrange interpolation with exact rational arithmetic; asserts the
    result is integral."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        # numerator polynomial prod_{j != i} (u - x_j), times y_i / denom
        denom = 1
        num = [Fraction(1)]
        for j in range(n):
            if j == i:
                continue
            denom *= xs[i] - xs[j]
            num = [
                (num[k - 1] if k > 0 else Fraction(0)) - xs[j] * (num[k] if k < len(num) else Fraction(0))
                for k in range(len(num) + 1)
            ]
        scale = Fraction(ys[i], denom)
        for k, c in enumerate(num):
            coeffs[k] += c * scale
    out = []
    for c in coeffs:
        assert c.denominator == 1
        out.append(int(c))
    return out


def frac_mat_inv(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    """Exact inverse via Gauss-Jordan over Q; raises on singular input."""
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                factor = a[i][col]
                a[i] = [x - factor * y for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]
