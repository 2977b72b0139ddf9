import math
from fractions import Fraction

import pytest

from algdyn.fpshift import (
    FpShiftSystem,
    cylinder_measure,
    frobenius_dilate,
    ideal_support_search,
    ledrappier_system,
    mixing_defect,
    window_count,
    window_entropy_trace,
)
from algdyn.laurent import parse_poly

LED = ledrappier_system()


class TestSystemConstruction:
    def test_from_json(self):
        sys_ = FpShiftSystem.from_json({"p": 2, "d": 2, "generators": ["1+u+v"]})
        assert sys_.p == 2 and sys_.d == 2
        assert sys_.generators[0].terms == {(0, 0): 1, (1, 0): 1, (0, 1): 1}

    def test_rejects_composite_characteristic(self):
        with pytest.raises(ValueError):
            FpShiftSystem(p=6, d=1, generators=[parse_poly("1+u", 1, 2)])

    def test_rejects_empty_generators(self):
        with pytest.raises(ValueError):
            FpShiftSystem(p=2, d=1, generators=[])

    def test_rejects_zero_generator(self):
        with pytest.raises(ValueError):
            FpShiftSystem(p=2, d=1, generators=[parse_poly("0", 1, 2)])


class TestWindowCount:
    def test_ledrappier_4x4(self):
        # rank oracle: the (n-1)^2 interior translates are independent,
        # leaving 2n-1 free coordinates
        wc = window_count(LED, 4)
        assert wc.constraint_rank == 9
        assert wc.free_dimension == 7

    def test_inconsistent_constant_relation(self):
        sys_ = FpShiftSystem(p=2, d=1, generators=[parse_poly("1", 1, 2)])
        assert window_count(sys_, 4).free_dimension == 0

    def test_p3_chain(self):
        # 1+u over F_3: each relation determines the next coordinate
        sys_ = FpShiftSystem(p=3, d=1, generators=[parse_poly("1+u", 1, 3)])
        for n in (2, 5, 9):
            assert window_count(sys_, n).free_dimension == 1

    def test_ledrappier_scaling_law(self):
        for n in (4, 8, 16, 32):
            wc = window_count(LED, n)
            assert wc.constraint_rank == (n - 1) ** 2
            assert wc.free_dimension == 2 * n - 1

    def test_boundary_bound_reported(self):
        wc = window_count(LED, 4)
        assert wc.boundary_discrepancy_bound > 0


class TestWindowEntropyTrace:
    def test_ledrappier_exact_values_and_decay(self):
        trace = window_entropy_trace(LED, [4, 8, 16, 32])
        for n, rate in trace.rows:
            assert rate == pytest.approx((2 * n - 1) * math.log(2) / n**2, abs=1e-14)
        rates = [r for _, r in trace.rows]
        assert rates == sorted(rates, reverse=True)
        assert rates[-1] < 0.05
        assert trace.expected_limit == 0.0

    def test_d1_chain(self):
        sys_ = FpShiftSystem(p=2, d=1, generators=[parse_poly("1+u", 1, 2)])
        trace = window_entropy_trace(sys_, [4, 8, 16])
        for n, rate in trace.rows:
            assert rate == pytest.approx(math.log(2) / n, abs=1e-14)

    def test_requires_increasing(self):
        with pytest.raises(ValueError):
            window_entropy_trace(LED, [8, 4])


class TestCylinderMeasure:
    def test_single_coordinate(self):
        res = cylinder_measure(LED, {(0, 0): 0})
        assert res.value == Fraction(1, 2)
        assert res.stabilized_at_halo == 0

    def test_pair_at_distance_two(self):
        assert cylinder_measure(LED, {(0, 0): 0, (2, 0): 0}).value == Fraction(1, 4)

    def test_frobenius_triple(self):
        # the squared relation ties the three coordinates together
        assert cylinder_measure(
            LED, {(0, 0): 0, (2, 0): 0, (0, 2): 0}
        ).value == Fraction(1, 4)

    def test_inconsistent_cylinder(self):
        # x_0 + x_{e1} + x_{e2} = 0 forbids the all-ones pattern
        assert cylinder_measure(LED, {(0, 0): 1, (1, 0): 1, (0, 1): 1}).value == 0

    def test_value_one_assignments(self):
        assert cylinder_measure(LED, {(0, 0): 1}).value == Fraction(1, 2)
        assert cylinder_measure(LED, {(0, 0): 1, (1, 0): 1, (0, 1): 0}).value == Fraction(1, 4)

    def test_p3_measures(self):
        sys_ = FpShiftSystem(p=3, d=1, generators=[parse_poly("1+u", 1, 3)])
        assert cylinder_measure(sys_, {(0,): 2}).value == Fraction(1, 3)
        # x_{k} = (-1)^k x_0: consistent pair has measure 1/3, not 1/9
        assert cylinder_measure(sys_, {(0,): 1, (2,): 1}).value == Fraction(1, 3)
        assert cylinder_measure(sys_, {(0,): 1, (1,): 1}).value == 0


class TestMixingDefect:
    def test_ledrappier_triple_defect(self):
        trace = mixing_defect(LED, [(0, 0), (1, 0), (0, 1)], {(0, 0): 0}, [2, 4, 8])
        assert trace.product_target == Fraction(1, 8)
        assert all(m == Fraction(1, 4) for m in trace.measured)
        assert all(d == Fraction(1, 8) for d in trace.defects)

    def test_pairs_mix(self):
        trace = mixing_defect(LED, [(0, 0), (1, 0)], {(0, 0): 0}, list(range(2, 65)))
        assert all(d == 0 for d in trace.defects)

    def test_singleton_shape(self):
        trace = mixing_defect(LED, [(0, 0)], {(0, 0): 0}, [3, 9])
        assert all(d == 0 for d in trace.defects)

    def test_defect_vanishes_off_powers_of_two(self):
        trace = mixing_defect(LED, [(0, 0), (1, 0), (0, 1)], {(0, 0): 0}, [3, 5, 6])
        assert all(d == 0 for d in trace.defects)


class TestIdealSupportSearch:
    def test_ledrappier_dilates(self):
        sups = ideal_support_search(LED, 9, 3)
        expected = {
            tuple(sorted(((0, 0), (2**k, 0), (0, 2**k)))) for k in range(4)
        }
        assert expected <= set(sups)

    def test_no_small_support_for_quintic(self):
        g = FpShiftSystem(p=2, d=2, generators=[parse_poly("1+u+u^2+u*v+v^2", 2, 2)])
        assert ideal_support_search(g, 8, 3) == []

    def test_d1_chain_pairs(self):
        sys_ = FpShiftSystem(p=2, d=1, generators=[parse_poly("u-1", 1, 2)])
        sups = ideal_support_search(sys_, 4, 2)
        assert set(sups) == {((0,), (k,)) for k in (1, 2, 3)}

    def test_supports_are_certified_nonmixing(self):
        # the returned shapes really fail to mix at the dilations where the
        # ideal element repeats (powers of p), with defect bounded away from 0
        sups = ideal_support_search(LED, 5, 3)
        origin_cyl = {(0, 0): 0}
        for sup in sups:
            if len(sup) < 2:
                continue
            trace = mixing_defect(LED, list(sup), origin_cyl, [2, 4])
            assert all(abs(d) >= Fraction(1, 2**6) for d in trace.defects)

    def test_p3_dilate_supports(self):
        sys_ = FpShiftSystem(p=3, d=1, generators=[parse_poly("1+u", 1, 3)])
        sups = ideal_support_search(sys_, 10, 2)
        # (1+u) * (1 - u + u^2 ... ) telescopes: 1 + u^(3^k) supports show up
        assert ((0,), (1,)) in sups
        assert ((0,), (3,)) in sups
        assert ((0,), (9,)) in sups


class TestFrobeniusDilate:
    def test_ledrappier_cube(self):
        f = parse_poly("1+u+v", 2, 2)
        assert frobenius_dilate(f, 3) == parse_poly("1+u^8+v^8", 2, 2)

    def test_identity_at_k0(self):
        f = parse_poly("1+2u", 1, 3)
        assert frobenius_dilate(f, 0) == f

    def test_f3_cube(self):
        assert frobenius_dilate(parse_poly("1+u", 1, 3), 1) == parse_poly("1+u^3", 1, 3)

    def test_matches_exact_power(self):
        f = parse_poly("1+u+v", 2, 2)
        assert frobenius_dilate(f, 2) == f**4

    def test_lies_in_principal_ideal(self):
        # exact division check: f^(p^k) = f * f^(p^k - 1)
        for p, text in ((2, "1+u+v"), (3, "1+u-v")):
            f = parse_poly(text, 2, p)
            for k in (1, 2):
                assert frobenius_dilate(f, k) == f * f ** (p**k - 1)


class TestEliminationPathsAgree:
    def test_packed_vs_dense_gf2(self):
        # the bit-packed GF(2) route and the generic dense route must give
        # identical measures
        import numpy as np

        from algdyn.fpshift import _measure_at_halo
        from algdyn.laurent import LaurentPoly

        rng = np.random.default_rng(99)
        for _ in range(60):
            terms = {(0, 0): 1}
            for _ in range(int(rng.integers(1, 4))):
                terms[(int(rng.integers(0, 3)), int(rng.integers(0, 3)))] = 1
            sys_ = FpShiftSystem(p=2, d=2, generators=[LaurentPoly(2, terms, 2)])
            cyl = {
                (int(rng.integers(0, 4)), int(rng.integers(0, 4))): int(rng.integers(0, 2))
                for _ in range(int(rng.integers(1, 4)))
            }
            for halo in (0, 1, 2):
                packed = _measure_at_halo(sys_, cyl, halo)
                dense = _measure_at_halo(sys_, cyl, halo, force_dense=True)
                assert packed == dense
