import cmath
import math
import unittest
from unittest import mock

import numpy as np

from nakano_fredholm import ExponentField, FredholmVerdict, InputError, Jump, PCSymbol, PolylineSampled, \
    SpaceSpec, TrendVerdict, UnitCircle, Weight
from nakano_fredholm.app import lab


class PrincipalValueTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.circle = UnitCircle(4096)

    def test_monomials(self):
        # S τⁿ = τⁿ for n ≥ 0 and −τⁿ for n < 0
        t = complex(self.circle.points[100])
        for n in (-32, -5, -1, 0, 1, 7, 32):
            with self.subTest(n=n):
                result = lab.pv_cauchy(self.circle, self.circle.points ** n, 100)
                expected = (1 if n >= 0 else -1) * t ** n
                self.assertLess(abs(result.value - expected), 1e-6)
                self.assertLess(abs(result.chord_value - expected), 1e-6)

    def test_density_shape_is_checked(self):
        with self.assertRaises(InputError):
            lab.pv_cauchy(self.circle, np.ones(10), 0)

    def test_density_must_be_finite(self):
        f = np.ones(4096, dtype=complex)
        f[7] = np.nan
        with self.assertRaises(InputError):
            lab.pv_cauchy(self.circle, f, 0)

    def test_open_curve_ends_are_rejected(self):
        segment = PolylineSampled([-1 + 0j, 1 + 0j], resolution=257)
        with self.assertRaises(InputError):
            lab.pv_cauchy(segment, np.ones(257), 1)

    def test_maximal_function_of_constant(self):
        estimate = lab.maximal_function(self.circle, np.full(4096, 2.0), 0)
        self.assertAlmostEqual(estimate.value, 2.0, delta=1e-8)
        self.assertFalse(estimate.divergent)

    def test_maximal_function_of_logarithm_grows_with_refinement(self):
        # the average of |log r| over [0, R] is 1 + log(1/R)
        segment = PolylineSampled([0j, 1 + 0j], resolution=1025)
        with np.errstate(divide='ignore'):
            f = np.log(np.abs(segment.points))
        estimate = lab.maximal_function(segment, f, 0)
        self.assertTrue(math.isfinite(estimate.value))
        self.assertTrue(estimate.growing)
        expected = 1.0 + math.log(1.0 / estimate.radius)
        self.assertAlmostEqual(estimate.value, expected, delta=3e-2 * expected)

    def test_s_norm_on_l2(self):
        curve = UnitCircle(1024)
        space = SpaceSpec(curve, ExponentField.constant(curve, 2.0), Weight())
        self.assertAlmostEqual(lab.s_norm_lower_bound(space, trials=4), 1.0, places=6)

    def test_s_norm_needs_circle(self):
        segment = PolylineSampled([-1 + 0j, 1 + 0j], resolution=65)
        space = SpaceSpec(segment, ExponentField.constant(segment, 2.0), Weight())
        with self.assertRaises(InputError):
            lab.s_norm_lower_bound(space)


class FiniteSectionTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.circle = UnitCircle(1024)
        cls.one = PCSymbol.constant(cls.circle, 1.0)

    def test_identity(self):
        section = lab.finite_section(self.one, self.one, 16)
        np.testing.assert_allclose(section.matrix, np.eye(33), atol=1e-12)
        self.assertEqual(list(section.basis), list(range(-16, 17)))

    def test_projection_is_idempotent(self):
        section = lab.finite_section(self.one, PCSymbol.constant(self.circle, 0.0), 16)
        matrix = section.matrix
        np.testing.assert_allclose(matrix @ matrix, matrix, atol=1e-12)
        np.testing.assert_allclose(np.diag(matrix).real, [0.0] * 16 + [1.0] * 17, atol=1e-12)

    def test_diagonal_symbol(self):
        section = lab.finite_section(PCSymbol.constant(self.circle, 2.0), self.one, 8)
        np.testing.assert_allclose(np.diag(section.matrix).real, [1.0] * 8 + [2.0] * 9, atol=1e-12)
        self.assertAlmostEqual(lab.sigma_min(section.matrix), 1.0, places=8)

    def test_order_guard(self):
        with self.assertRaises(InputError):
            lab.finite_section(self.one, self.one, lab.MAX_ORDER + 1)

    def test_needs_circle(self):
        segment = PolylineSampled([-1 + 0j, 1 + 0j], resolution=65)
        one = PCSymbol.constant(segment, 1.0)
        with self.assertRaises(InputError):
            lab.finite_section(one, one, 8)

    def test_emulation_exponents(self):
        a = PCSymbol.with_jumps(self.circle, [Jump(-1 + 0j, 1, 1j)])
        exponents = lab.emulation_exponents(a, self.one, 3.0, 0.25)
        self.assertAlmostEqual(exponents[1 + 0j], 1.0 / 3.0 + 0.25 - 0.5)
        self.assertEqual(len(exponents), 2)

    def test_sigma_min_of_diagonal(self):
        self.assertAlmostEqual(lab.sigma_min(np.diag([3.0, 2.0, 0.5])), 0.5, places=8)

    def test_sigma_min_of_singular_matrix(self):
        self.assertEqual(lab.sigma_min(np.zeros((3, 3))), 0.0)

    def test_sigma_min_needs_square_matrix(self):
        with self.assertRaises(InputError):
            lab.sigma_min(np.ones((2, 3)))


class TrendTest(unittest.TestCase):
    orders = [32, 64, 128, 256]

    def test_plateau(self):
        verdict, _ = lab.classify_trend(self.orders, [0.71, 0.7, 0.7, 0.7])
        self.assertEqual(verdict, TrendVerdict.PLATEAU)

    def test_power_decay(self):
        verdict, slope = lab.classify_trend(self.orders, [1.0 / n for n in self.orders])
        self.assertEqual(verdict, TrendVerdict.DECAY)
        self.assertAlmostEqual(slope, -math.log(2), places=9)

    def test_logarithmic_decay(self):
        verdict, _ = lab.classify_trend(self.orders, [1.0 / math.log(n) for n in self.orders])
        self.assertEqual(verdict, TrendVerdict.DECAY)

    def test_zero_is_decay(self):
        verdict, _ = lab.classify_trend(self.orders, [0.5, 0.1, 0.01, 0.0])
        self.assertEqual(verdict, TrendVerdict.DECAY)

    def test_slow_fall_at_a_jump_is_decay(self):
        sigmas = [0.2647, 0.2413, 0.2215, 0.2047]
        self.assertTrue(lab.logarithmic_decay(self.orders, sigmas))
        verdict, _ = lab.classify_trend(self.orders, sigmas)
        self.assertEqual(verdict, TrendVerdict.DECAY)

    def test_slow_convergence_is_plateau(self):
        sigmas = [0.3 + 0.2 * n ** -0.3 for n in self.orders]
        self.assertFalse(lab.logarithmic_decay(self.orders, sigmas))
        verdict, _ = lab.classify_trend(self.orders, sigmas)
        self.assertEqual(verdict, TrendVerdict.PLATEAU)

    def test_inconclusive(self):
        verdict, _ = lab.classify_trend(self.orders, [0.5, 0.2, 0.4, 0.1])
        self.assertEqual(verdict, TrendVerdict.INCONCLUSIVE)

    def test_identity_trend_is_plateau(self):
        circle = UnitCircle(256)
        one = PCSymbol.constant(circle, 1.0)
        trend = lab.sigma_min_trend(one, one, [4, 8, 16, 32])
        self.assertEqual(trend.verdict, TrendVerdict.PLATEAU)
        np.testing.assert_allclose(trend.sigmas, 1.0, atol=1e-8)

    def test_trend_uses_sigma_min_of_each_section(self):
        circle = UnitCircle(256)
        one = PCSymbol.constant(circle, 1.0)
        with mock.patch.object(lab, 'sigma_min') as mock_sigma_min:
            mock_sigma_min.side_effect = lambda matrix: 1.0 / len(matrix)
            trend = lab.sigma_min_trend(one, one, [4, 8, 16, 32])
        self.assertEqual(mock_sigma_min.call_count, 4)
        self.assertEqual(trend.verdict, TrendVerdict.DECAY)

    def test_trend_needs_four_increasing_orders(self):
        circle = UnitCircle(256)
        one = PCSymbol.constant(circle, 1.0)
        with self.assertRaises(InputError):
            lab.sigma_min_trend(one, one, [8, 16, 32])
        with self.assertRaises(InputError):
            lab.sigma_min_trend(one, one, [8, 16, 16, 32])


class SuiteTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.circle = UnitCircle(1024)

    def test_circle_criterion(self):
        self.assertFalse(lab.circle_criterion(Jump(1 + 0j, 1, -1), 2.0))
        self.assertTrue(lab.circle_criterion(Jump(1 + 0j, 1, -1), 3.0))
        self.assertTrue(lab.circle_criterion(Jump(1 + 0j, 1, 1j), 3.0))

    def test_case_compares_verdict_with_trend(self):
        left, right = 1 + 0j, 2 * cmath.exp(1j * math.pi / 3)
        plateau = lab.SigmaTrend([32, 64, 128, 256], [0.6] * 4, TrendVerdict.PLATEAU, 0.0)
        with mock.patch.object(lab, 'sigma_min_trend', return_value=plateau) as mock_trend:
            case = lab._run_case(self.circle, (left, right), 2.0, 0.0, lab.DEFAULT_ORDERS, 1e-3)
        mock_trend.assert_called_once()
        self.assertEqual(case.fredholm, FredholmVerdict.FREDHOLM)
        self.assertTrue(case.decisive)
        self.assertTrue(case.agrees)

    def test_suite_report_counts_decisive_cases(self):
        plateau = lab.SigmaTrend([32, 64, 128, 256], [1.0] * 4, TrendVerdict.PLATEAU, 0.0)
        decay = lab.SigmaTrend([32, 64, 128, 256], [0.1, 0.05, 0.02, 0.01], TrendVerdict.DECAY, -1.1)
        report = lab.SuiteReport([
            lab.SuiteCase((1, 1j), 2.0, 0.0, FredholmVerdict.FREDHOLM, plateau),
            lab.SuiteCase((1, 1j), 2.0, 0.25, FredholmVerdict.NOT_FREDHOLM, decay),
            lab.SuiteCase((1, -1), 2.0, 0.0, FredholmVerdict.NOT_FREDHOLM, plateau),
            lab.SuiteCase((1, -1), 2.0, 0.5, FredholmVerdict.BORDERLINE, plateau),
        ])
        self.assertEqual(report.decisive, 3)
        self.assertEqual(report.agreements, 2)
        self.assertEqual(str(report), "finite-section agreement: 2/3 non-Borderline cases")

    def test_circle_criterion_check_is_seeded(self):
        first = lab.circle_criterion_check(self.circle, count=6, seed=11)
        second = lab.circle_criterion_check(self.circle, count=6, seed=11)
        self.assertEqual([c.jump for c in first.checks], [c.jump for c in second.checks])
        self.assertEqual(first.agreements, len(first.checks))

    def test_algebra_suite_collects_every_pair(self):
        passing, failing = mock.Mock(passed=True), mock.Mock(passed=False)
        with mock.patch.object(lab, 'index_algebra_checks', return_value=[passing, failing]) as mock_checks:
            report = lab.algebra_suite(self.circle, 0, count=3, seed=5, workers=1)
        self.assertEqual(mock_checks.call_count, 3)
        self.assertEqual(len(report.checks), 6)
        self.assertEqual(report.passed, 3)
        self.assertEqual(str(report), "index algebra: 3/6 checks passed")

    def test_parallel_keeps_order(self):
        tasks = [lambda k=k: k * k for k in range(6)]
        self.assertEqual(lab._parallel(tasks, 3), [0, 1, 4, 9, 16, 25])


class AgreementTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.circle = UnitCircle(4096)

    def test_jump_to_minus_one_decays(self):
        a = PCSymbol.with_jumps(self.circle, [Jump(1 + 0j, 1, -1)])
        b = PCSymbol.constant(self.circle, 1.0)
        trend = lab.sigma_min_trend(a, b)
        self.assertEqual(trend.verdict, TrendVerdict.DECAY, str(trend))

    def test_agreement_suite(self):
        report = lab.agreement_suite(self.circle, workers=2)
        disagreements = [str(case) for case in report.cases if case.decisive and not case.agrees]
        self.assertEqual(report.decisive, 12)
        self.assertEqual(report.agreements, 12, disagreements)


if __name__ == '__main__':
    unittest.main()
