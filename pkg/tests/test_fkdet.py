import math
from fractions import Fraction

import numpy as np
import pytest

from algdyn.fkdet import (
    HEISENBERG,
    GroupRingElement,
    NotLopsidedError,
    ball,
    compare_estimators,
    finite_section_logdet,
    group_inv,
    group_mul,
    section_matrix,
    trace_series_logdet,
    zd,
)
from algdyn.laurent import GridSpec, parse_poly
from algdyn.torus import riemann_mahler


def heis(terms):
    return GroupRingElement(HEISENBERG, terms)


class TestGroupLaw:
    def test_vu_equals_wuv(self):
        # v * u must come out as u v w in normal form
        assert group_mul((0, 1, 0), (1, 0, 0), HEISENBERG) == (1, 1, 1)

    def test_identity(self):
        g = (3, -2, 7)
        e = HEISENBERG.identity
        assert group_mul(g, e, HEISENBERG) == g
        assert group_mul(e, g, HEISENBERG) == g

    def test_free_abelian_commutes(self):
        spec = zd(2)
        assert group_mul((1, 0), (0, 1), spec) == (1, 1) == group_mul((0, 1), (1, 0), spec)

    def test_inverses(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            g = tuple(int(x) for x in rng.integers(-5, 6, size=3))
            assert group_mul(g, group_inv(g, HEISENBERG), HEISENBERG) == (0, 0, 0)
            assert group_mul(group_inv(g, HEISENBERG), g, HEISENBERG) == (0, 0, 0)

    def test_associativity_spot(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            a, b, c = (
                tuple(int(x) for x in rng.integers(-4, 5, size=3)) for _ in range(3)
            )
            left = group_mul(group_mul(a, b, HEISENBERG), c, HEISENBERG)
            right = group_mul(a, group_mul(b, c, HEISENBERG), HEISENBERG)
            assert left == right


class TestSections:
    def test_toeplitz_section_reaches_log3(self):
        f = GroupRingElement(zd(1), {(0,): -3, (1,): 2})
        est = finite_section_logdet(f, 256)
        assert abs(est.value - math.log(3)) <= 5e-2
        assert est.ball_size == 513

    def test_single_group_element_is_exactly_zero(self):
        # kept singular values are all exactly 1; columns whose translate
        # leaves the ball contribute zeros, which the floor discards
        for spec, g in ((zd(2), (2, -1)), (HEISENBERG, (1, 2, 3))):
            f = GroupRingElement(spec, {g: 1})
            for r in (1, 2, 4):
                est = finite_section_logdet(f, r)
                assert est.value == 0.0
                assert est.discarded < est.ball_size

    @pytest.mark.slow
    def test_z2_ledrappier_symbol(self):
        # a 65^2 section lands within ~5.2e-2 of the true measure 0.3230;
        # sections converge slowly when the symbol vanishes on the torus, so
        # the tolerance here records observed quality, not a convergence claim
        f = GroupRingElement(zd(2), {(0, 0): 1, (1, 0): 1, (0, 1): 1})
        est = finite_section_logdet(f, 32)
        assert abs(est.value - 0.3230) <= 5.5e-2

    def test_involution_sections_are_transposes(self):
        rng = np.random.default_rng(5)
        for spec, r in ((zd(2), 3), (HEISENBERG, 2)):
            for _ in range(10):
                f = _random_gre(rng, spec)
                assert np.array_equal(
                    section_matrix(f.involute(), r), section_matrix(f, r).T
                )

    def test_involution_logdet_equal(self):
        rng = np.random.default_rng(6)
        for spec, r in ((zd(2), 3), (HEISENBERG, 2)):
            f = _random_gre(rng, spec)
            a = finite_section_logdet(f, r).value
            b = finite_section_logdet(f.involute(), r).value
            assert b == pytest.approx(a, abs=1e-9)

    def test_heisenberg_ball_shape(self):
        elems = ball(HEISENBERG, 2)
        assert len(elems) == 5 * 5 * 9
        assert all(abs(a) <= 2 and abs(b) <= 2 and abs(c) <= 4 for a, b, c in elems)


def _random_gre(rng, spec, n_terms=4):
    terms = {}
    for _ in range(n_terms):
        g = tuple(int(x) for x in rng.integers(-1, 2, size=spec.d))
        terms[g] = terms.get(g, 0) + int(rng.integers(-3, 4))
    f = GroupRingElement(spec, terms)
    if f.is_zero:
        f = GroupRingElement(spec, {spec.identity: 1})
    return f


class TestTraceSeries:
    def test_shifted_constant_on_z(self):
        # no word in u alone returns to the identity, so the series is flat
        f = GroupRingElement(zd(1), {(0,): 3, (1,): -1})
        est = trace_series_logdet(f, 30)
        assert est.value == math.log(3)
        assert all(t == 0 for t in est.taus)

    def test_heisenberg_positive_words_never_return(self):
        f = heis({(0, 0, 0): 5, (1, 0, 0): 1, (0, 1, 0): 1})
        est = trace_series_logdet(f, 20)
        assert est.value == math.log(5)
        assert all(t == 0 for t in est.taus)
        assert est.error_indicator < 1e-9

    def test_z2_walk_returns_match_combinatorics(self):
        # tau(g^k) = (closed-walk count) / 5^k; closed walks of length 2m on
        # Z^2 number C(2m, m)^2
        f = GroupRingElement(
            zd(2), {(0, 0): 5, (1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1}
        )
        est = trace_series_logdet(f, 8)
        for k, tau in enumerate(est.taus, start=1):
            if k % 2:
                assert tau == 0
            else:
                m = k // 2
                assert tau == Fraction(math.comb(k, m) ** 2, 5**k)

    def test_torus_integral_agreement(self):
        f = GroupRingElement(
            zd(2), {(0, 0): 5, (1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1}
        )
        est = trace_series_logdet(f, 40)
        ref = riemann_mahler(parse_poly("5+u+u^-1+v+v^-1", 2), GridSpec((512, 512))).value
        assert abs(est.value - ref) <= 1e-3
        assert abs(est.value - ref) <= est.error_indicator + 1e-6

    def test_refuses_non_lopsided(self):
        f = GroupRingElement(zd(2), {(0, 0): 1, (1, 0): 1, (0, 1): 1})
        with pytest.raises(NotLopsidedError):
            trace_series_logdet(f, 10)
        g = GroupRingElement(zd(1), {(0,): 2, (1,): 1, (-1,): 1})  # ties fail too
        with pytest.raises(NotLopsidedError):
            trace_series_logdet(g, 10)

    def test_refuses_past_order_cap(self):
        f = GroupRingElement(zd(1), {(0,): 3, (1,): 1})
        with pytest.raises(ValueError):
            trace_series_logdet(f, 61)

    def test_multiplicativity_probe(self):
        f1 = GroupRingElement(zd(1), {(0,): 4, (1,): 1})
        f2 = GroupRingElement(zd(1), {(0,): 5, (-1,): 2})
        prod = f1 * f2
        e1 = trace_series_logdet(f1, 40)
        e2 = trace_series_logdet(f2, 40)
        ep = trace_series_logdet(prod, 40)
        tol = e1.error_indicator + e2.error_indicator + ep.error_indicator + 1e-9
        assert abs(ep.value - (e1.value + e2.value)) <= tol


class TestCompare:
    def test_z1_reference(self):
        f = GroupRingElement(zd(1), {(0,): -3, (1,): 2})
        cmp_ = compare_estimators(f, radius=256, order=20)
        assert cmp_.reference == pytest.approx(math.log(3), abs=1e-10)
        assert cmp_.reference_method == "jensen"
        assert abs(cmp_.finite_section.value - cmp_.reference) <= 5e-2
        assert cmp_.gap is not None and cmp_.gap <= 5e-2

    def test_heisenberg_both_methods(self):
        f = heis({(0, 0, 0): 5, (1, 0, 0): 1, (0, 1, 0): 1})
        cmp_ = compare_estimators(f, radius=3, order=20)
        assert cmp_.reference is None
        assert cmp_.trace_series.value == math.log(5)
        assert abs(cmp_.finite_section.value - math.log(5)) <= cmp_.finite_section.error_indicator + 0.05

    def test_single_element_both_zero(self):
        f = GroupRingElement(zd(2), {(1, 1): 1})
        cmp_ = compare_estimators(f, radius=3, order=5)
        assert cmp_.finite_section.value == 0.0
        assert cmp_.trace_series_skipped is not None  # identity coeff is 0
