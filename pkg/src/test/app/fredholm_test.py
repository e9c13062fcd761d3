import cmath
import math
import unittest

import numpy as np

from nakano_fredholm import ExponentField, FredholmVerdict, InputError, Jump, LogSpiralAttached, PCSymbol, Power, \
    SpaceSpec, UnitCircle, V0, Verdict, Weight, decide_fredholm, decide_maximal_bounded, decide_S_bounded, index_pair, \
    leaf
from nakano_fredholm.app.fredholm import IndicatorProfile, gamma_local, indicator_at, indicator_profile, \
    integer_margin, jump_criterion, local_S_bounded, mobius, nonsingular, phi_weight, select_kt


def power_space(curve, p, exponent):
    weight = Weight([Power(1 + 0j, exponent)]) if exponent else Weight()
    return SpaceSpec(curve, ExponentField.constant(curve, p), weight)


class BoundednessTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.circle = UnitCircle(1024)

    def test_power_weight_table(self):
        # |τ−1|^λ on the circle: S is bounded iff −1/p < λ < 1−1/p
        for p in (1.5, 2.0, 3.0, 4.0):
            for exponent in np.round(np.arange(-0.9, 0.95, 0.05), 2):
                lower, upper = -1.0 / p, 1.0 - 1.0 / p
                if min(abs(exponent - lower), abs(exponent - upper)) < 0.02:
                    continue
                with self.subTest(p=p, exponent=exponent):
                    report = decide_S_bounded(power_space(self.circle, p, float(exponent)), diagnostics=False)
                    expected = Verdict.YES if lower < exponent < upper else Verdict.NO
                    self.assertEqual(report.verdict, expected)

    def test_boundary_exponent_is_borderline(self):
        report = decide_S_bounded(power_space(self.circle, 2.0, 0.5), diagnostics=False)
        self.assertEqual(report.verdict, Verdict.BORDERLINE)

    def test_unweighted_space(self):
        report = decide_S_bounded(power_space(self.circle, 2.0, 0.0), diagnostics=False)
        self.assertEqual(report.verdict, Verdict.YES)
        self.assertEqual(report.points, [])

    def test_diagnostics_of_bounded_case(self):
        report = decide_S_bounded(power_space(self.circle, 2.0, 0.25))
        self.assertEqual(report.verdict, Verdict.YES)
        ersatz = report.ersatz[0]
        self.assertTrue(ersatz.sufficient)
        self.assertEqual(ersatz.power_interval, (-0.5, 0.5))
        self.assertEqual(ersatz.exact_interval, (-0.5, 0.5))
        self.assertTrue(1.0 < report.p0.p0 < 2.0)
        self.assertTrue(report.necessity[0].strict)

    def test_maximal_operator_follows_the_same_margins(self):
        self.assertEqual(decide_maximal_bounded(power_space(self.circle, 3.0, 0.6)).verdict, Verdict.YES)
        self.assertEqual(decide_maximal_bounded(power_space(self.circle, 3.0, 0.7)).verdict, Verdict.NO)


class LeafTest(unittest.TestCase):
    def test_mobius(self):
        self.assertEqual(mobius(1, -1, 0), 1)
        self.assertEqual(mobius(1, -1, complex('inf')), -1)
        with self.assertRaises(InputError):
            mobius(1, -1, 1)

    def test_half_circle_leaf_contains_origin(self):
        drawn = leaf(1, -1, 2.0, IndicatorProfile.flat(1, 2.0))
        self.assertTrue(drawn.contains(0j, 1e-9))

    def test_leaf_endpoints_are_members(self):
        drawn = leaf(1, 2j, 3.0, IndicatorProfile.flat(1, 3.0, -0.1, 0.2))
        self.assertTrue(drawn.contains(1 + 0j, 1e-6))
        self.assertTrue(drawn.contains(2j, 1e-6))

    def test_leaf_of_equal_ends_is_a_point(self):
        drawn = leaf(1j, 1j, 2.0, IndicatorProfile.flat(1, 2.0))
        self.assertTrue(drawn.degenerate)
        self.assertAlmostEqual(drawn.origin_distance(), 1.0)

    def test_flat_leaf_is_a_circular_arc(self):
        # (z−z1)/(z−z2) has argument 2π/p along the boundary of a flat leaf
        drawn = leaf(1, -1, 3.0, IndicatorProfile.flat(1, 3.0))
        z = drawn.lower[np.abs(drawn.x_grid) <= 1.0]
        angles = np.angle((z - 1) / (z + 1))
        np.testing.assert_allclose(np.abs(angles), abs(cmath.phase(cmath.exp(2j * math.pi / 3))), atol=1e-9)


class FredholmTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.circle = UnitCircle(1024)
        cls.one = PCSymbol.constant(cls.circle, 1.0)

    def jump(self, left, right):
        return PCSymbol.with_jumps(self.circle, [Jump(1 + 0j, left, right)], 'a')

    def test_integer_margin(self):
        self.assertAlmostEqual(integer_margin(0.2, 0.3), 0.2)
        self.assertAlmostEqual(integer_margin(0.9, 1.2), -0.1)
        self.assertAlmostEqual(integer_margin(1.0, 1.0), 0.0)

    def test_symbol_limits_and_jumps(self):
        a = self.jump(1, -1)
        self.assertEqual(a.limits(0), (1 + 0j, -1 + 0j))
        self.assertEqual(len(a.jumps()), 1)
        self.assertAlmostEqual(a.range_minimum()[0], 1.0, places=9)
        self.assertEqual(self.one.jumps(), [])

    def test_symbol_quotient(self):
        c = self.jump(2, 1j).divided(PCSymbol.constant(self.circle, 2.0))
        self.assertEqual(c.limits(0), (1 + 0j, 0.5j))

    def test_opposite_jump_is_not_fredholm_for_p_two(self):
        report = decide_fredholm(self.jump(1, -1), self.one, power_space(self.circle, 2.0, 0.0),
                                 diagnostics=False)
        self.assertEqual(report.verdict, FredholmVerdict.NOT_FREDHOLM)

    def test_opposite_jump_is_fredholm_for_p_three(self):
        report = decide_fredholm(self.jump(1, -1), self.one, power_space(self.circle, 3.0, 0.0),
                                 diagnostics=False)
        self.assertEqual(report.verdict, FredholmVerdict.FREDHOLM)

    def test_weight_moves_the_leaf(self):
        report = decide_fredholm(self.jump(1, -1), self.one, power_space(self.circle, 2.0, 0.25),
                                 diagnostics=False)
        self.assertEqual(report.verdict, FredholmVerdict.FREDHOLM)

    def test_jump_criterion_expression(self):
        space = power_space(self.circle, 2.0, 0.0)
        criterion = jump_criterion(space, Jump(1 + 0j, 1, 2 * cmath.exp(1j * math.pi / 3)))
        self.assertAlmostEqual(criterion.low, 2.0 / 3.0, delta=1e-3)
        self.assertAlmostEqual(criterion.high, 2.0 / 3.0, delta=1e-3)
        self.assertTrue(criterion.nonsingular)

    def test_vanishing_b_is_not_fredholm(self):
        report = decide_fredholm(self.one, PCSymbol.constant(self.circle, 0.0),
                                 power_space(self.circle, 2.0, 0.0), diagnostics=False)
        self.assertEqual(report.verdict, FredholmVerdict.NOT_FREDHOLM)

    def test_continuous_invertible_symbols_are_fredholm(self):
        report = decide_fredholm(PCSymbol.constant(self.circle, 2.0), self.one,
                                 power_space(self.circle, 2.0, 0.0), diagnostics=False)
        self.assertEqual(report.verdict, FredholmVerdict.FREDHOLM)

    def test_unbounded_s_is_an_input_error(self):
        with self.assertRaises(InputError):
            decide_fredholm(self.one, self.one, power_space(self.circle, 2.0, 0.9), diagnostics=False)

    def test_borderline_s_gives_borderline(self):
        report = decide_fredholm(self.one, self.one, power_space(self.circle, 2.0, 0.5), diagnostics=False)
        self.assertEqual(report.verdict, FredholmVerdict.BORDERLINE)

    def test_gamma_local(self):
        gamma = gamma_local(self.jump(1, -1), 0)
        self.assertAlmostEqual(abs(gamma.real), 0.5, places=12)
        self.assertAlmostEqual(gamma.imag, 0.0, places=12)
        gamma = gamma_local(self.jump(1, math.e), 0)
        self.assertAlmostEqual(gamma.real, 0.0, places=12)
        self.assertAlmostEqual(gamma.imag, 1 / (2 * math.pi), places=12)

    def test_select_kt(self):
        space = power_space(self.circle, 2.0, 0.0)
        self.assertEqual(select_kt(space, 0, 0.25 + 0j), 0)
        self.assertEqual(select_kt(space, 0, 1.75 + 0j), 2)
        self.assertIsNone(select_kt(space, 0, 0.5 + 0j))

    def test_local_S_bounded(self):
        space = power_space(self.circle, 2.0, 0.0)
        self.assertEqual(phi_weight(1 + 0j, 0.25).gamma, 0.25 + 0j)
        self.assertEqual(local_S_bounded(space, 0, 0.25 + 0j, 0).verdict, Verdict.YES)
        self.assertEqual(local_S_bounded(space, 0, 0.75 + 0j, 0).verdict, Verdict.NO)

    def test_nonsingular(self):
        space = power_space(self.circle, 2.0, 0.0)
        self.assertFalse(nonsingular(self.jump(1, -1), space).nonsingular)
        self.assertTrue(nonsingular(self.jump(1, 1j), space).nonsingular)
        self.assertFalse(nonsingular(PCSymbol.constant(self.circle, 0.0), space).nonsingular)

    def test_indicator_profile_of_smooth_point(self):
        profile = indicator_profile(power_space(self.circle, 2.0, 0.0), 0)
        self.assertLess(float(np.max(np.abs(profile.alpha_star))), 2e-2)
        self.assertLess(float(np.max(np.abs(profile.beta_star))), 2e-2)
        self.assertEqual(profile.p, 2.0)

    def test_leaf_of_singular_jump_meets_origin(self):
        space = power_space(self.circle, 2.0, 0.0)
        criterion = jump_criterion(space, Jump(1 + 0j, 1, -1), with_leaf=True)
        self.assertFalse(criterion.nonsingular)
        self.assertLessEqual(criterion.leaf_origin_distance, 1e-9)

    def test_invertible_b_reduces_to_the_quotient(self):
        two = PCSymbol.constant(self.circle, 2.0)
        for p in (2.0, 3.0):
            for right in (-1, 1j):
                with self.subTest(p=p, right=right):
                    space = power_space(self.circle, p, 0.0)
                    reduced = decide_fredholm(self.jump(1, right).divided(two), self.one, space, diagnostics=False)
                    report = decide_fredholm(self.jump(1, right), two, space, diagnostics=False)
                    self.assertEqual(report.verdict, reduced.verdict)
                    self.assertAlmostEqual(report.b_minimum, 2.0, places=9)
                    self.assertAlmostEqual(report.nonsingularity.jumps[0].low,
                                           reduced.nonsingularity.jumps[0].low, places=9)

    def test_common_continuous_factor_keeps_the_verdict(self):
        length = self.circle.length
        g = PCSymbol.table(self.circle, [(0.0, 2.0), (length / 3, 1 + 1j), (2 * length / 3, 3.0)], 'g')
        self.assertEqual(g.jumps(), [])
        for p in (2.0, 3.0):
            with self.subTest(p=p):
                space = power_space(self.circle, p, 0.0)
                plain = decide_fredholm(self.jump(1, -1), self.one, space, diagnostics=False)
                scaled = decide_fredholm(self.jump(1, -1).times(g), g, space, diagnostics=False)
                self.assertEqual(scaled.verdict, plain.verdict)


class ProfileTest(unittest.TestCase):
    GRID = np.linspace(-1.0, 1.0, 5)

    def test_profile_at_a_spiral_point(self):
        spiral = LogSpiralAttached(UnitCircle(512), 1 + 0j, 1.0)
        profile = indicator_profile(SpaceSpec(spiral, ExponentField.constant(spiral, 2.0), Weight()), 0, self.GRID)
        np.testing.assert_allclose(profile.alpha_star, self.GRID, atol=2e-2)
        np.testing.assert_allclose(profile.beta_star, self.GRID, atol=2e-2)

    def test_profile_of_power_weight_is_flat(self):
        circle = UnitCircle(1024)
        profile = indicator_profile(power_space(circle, 2.0, 0.3), 0, self.GRID)
        np.testing.assert_allclose(profile.alpha_star, 0.3, atol=1e-2)
        np.testing.assert_allclose(profile.beta_star, 0.3, atol=1e-2)

    def test_profile_at_zero_matches_v0(self):
        circle = UnitCircle(1024)
        space = power_space(circle, 2.0, 0.3)
        at_zero = indicator_at(space, 0, 0.0)
        v0 = index_pair(V0(circle, 0, space.weight))
        self.assertAlmostEqual(at_zero.alpha, v0.alpha, delta=5e-3)
        self.assertAlmostEqual(at_zero.beta, v0.beta, delta=5e-3)


if __name__ == '__main__':
    unittest.main()
