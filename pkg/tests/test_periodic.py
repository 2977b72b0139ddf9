import math

import numpy as np
import pytest

from algdyn.laurent import GridSpec, parse_poly
from algdyn.local import IntPoly, mahler_1d
from algdyn.periodic import (
    growth_rate_trace,
    principal_periodic_count,
    toral_periodic_count,
)
from algdyn.torus import riemann_mahler

FIB = [[0, 1], [1, 1]]
GOLDEN_ENTROPY = math.log((1 + 5**0.5) / 2)


class TestToralCounts:
    def test_fibonacci_n1(self):
        assert toral_periodic_count(FIB, 1).count == 1

    def test_fibonacci_n5(self):
        assert toral_periodic_count(FIB, 5).count == 11

    def test_identity_flagged_infinite(self):
        res = toral_periodic_count([[1, 0], [0, 1]], 3)
        assert res.count == 0 and res.infinite_fixed_set

    def test_eigenvalue_identity(self):
        # |det(A^n - I)| = prod |lambda_i^n - 1| within relative 1e-6
        rng = np.random.default_rng(12)
        checked = 0
        while checked < 20:
            size = int(rng.integers(2, 4))
            A = [[int(rng.integers(-3, 4)) for _ in range(size)] for _ in range(size)]
            lam = np.linalg.eigvals(np.array(A, dtype=float))
            if np.any(np.abs(np.abs(lam) - 1) < 1e-3) or np.any(np.abs(lam) < 1e-9):
                continue
            n = int(rng.integers(1, 8))
            exact = toral_periodic_count(A, n).count
            approx = abs(np.prod(lam**n - 1))
            if exact == 0:
                continue
            assert abs(exact - approx) <= 1e-6 * approx
            checked += 1

    def test_divisibility(self):
        # fixed-point groups nest: count at m divides count at n when m | n
        for A in (FIB, [[2, 1], [1, 1]], [[0, 1, 0], [0, 0, 1], [1, 1, 0]]):
            counts = {n: toral_periodic_count(A, n).count for n in range(1, 13)}
            for n in range(1, 13):
                for m in range(1, n):
                    if n % m == 0 and counts[m] > 0:
                        assert counts[n] % counts[m] == 0


class TestPrincipalCounts:
    def test_n2_product_three(self):
        res = principal_periodic_count(parse_poly("1+u+v", 2), 2)
        assert res.exact_product == 3
        assert res.full_product == pytest.approx(3.0, rel=1e-10)
        assert res.component_rate == pytest.approx(math.log(3) / 4, abs=1e-12)
        assert not res.degenerate

    def test_n3_degenerate(self):
        res = principal_periodic_count(parse_poly("1+u+v", 2), 3)
        assert res.degenerate
        assert res.exact_product == 0
        assert res.full_product == 0.0
        assert res.component_rate == pytest.approx(4 * math.log(3) / 9, abs=1e-12)

    def test_constant(self):
        res = principal_periodic_count(parse_poly("-7", 1), 1)
        assert res.exact_product == 7
        assert res.component_rate == pytest.approx(math.log(7), abs=1e-12)

    def test_exact_vs_float_cross_check(self):
        # the constructor itself raises on disagreement; exercise it over a
        # spread of polynomials and periods
        rng = np.random.default_rng(3)
        for _ in range(15):
            terms = {}
            for _ in range(3):
                m = (int(rng.integers(-2, 3)), int(rng.integers(-2, 3)))
                terms[m] = terms.get(m, 0) + int(rng.integers(-3, 4))
            f = parse_poly("5", 2) if not any(terms.values()) else None
            from algdyn.laurent import LaurentPoly

            f = f or LaurentPoly(2, terms)
            if f.is_zero:
                continue
            n = int(rng.integers(1, 7))
            res = principal_periodic_count(f, n)
            if not res.degenerate:
                assert res.exact_product is not None and res.exact_product > 0

    def test_component_rate_shares_riemann_code_path(self):
        f = parse_poly("1+u+v", 2)
        for n in (2, 3, 5):
            res = principal_periodic_count(f, n)
            direct = riemann_mahler(f, GridSpec((n, n)))
            assert res.component_rate == direct.value  # bit-for-bit


class TestGrowthTraces:
    def test_fibonacci_growth_to_golden_mean(self):
        rows = growth_rate_trace(FIB, [5, 10, 20, 30, 40, 50])
        assert rows[0].target == pytest.approx(GOLDEN_ENTROPY, abs=1e-10)
        final = rows[-1]
        assert final.n == 50
        assert abs(final.normalized_rate - GOLDEN_ENTROPY) <= 1e-2

    def test_ledrappier_symbol_rates(self):
        f = parse_poly("1+u+v", 2)
        n_list = [n for n in range(350, 401) if n % 3][:3]
        rows = growth_rate_trace(f, n_list, target=0.3230)
        for r in rows:
            assert abs(r.normalized_rate - 0.3230) <= 5e-3

    def test_diagonal_closed_form(self):
        # A = 2I: counts (2^n - 1)^2, rates -> 2 log 2
        rows = growth_rate_trace([[2, 0], [0, 2]], [5, 10, 40])
        for r in rows:
            assert r.count_or_log == (2**r.n - 1) ** 2
        assert rows[-1].normalized_rate == pytest.approx(2 * math.log(2), abs=1e-10)

    def test_increasing_required(self):
        with pytest.raises(ValueError):
            growth_rate_trace(FIB, [5, 5])


class TestMahlerTargetConsistency:
    def test_toral_rate_matches_charpoly_mahler(self):
        # acceptance-scale identity: (1/50) log count ~ m(u^2 - u - 1)
        res = toral_periodic_count(FIB, 50)
        rate = math.log(res.count) / 50
        assert abs(rate - mahler_1d(IntPoly([-1, -1, 1]))) <= 1e-2
