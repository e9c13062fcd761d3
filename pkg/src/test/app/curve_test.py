import math
import unittest

import numpy as np

from nakano_fredholm import ConfigFactory, CurveKind, InputError, LogSpiralAttached, PolylineSampled, \
    SmoothJordan, UnitCircle
from nakano_fredholm.app.indices import spirality


class CurveTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.circle = UnitCircle(2048)

    def test_circle_length(self):
        self.assertAlmostEqual(self.circle.length, 2 * math.pi, places=9)
        self.assertTrue(self.circle.closed)
        self.assertEqual(self.circle.kind, CurveKind.UNIT_CIRCLE)

    def test_circle_carleson_constant(self):
        report = self.circle.carleson_constant()
        self.assertAlmostEqual(report.value, math.pi, delta=1e-3)

    def test_segment_carleson_constant(self):
        segment = PolylineSampled([-1 + 0j, 1 + 0j], closed=False, resolution=1025)
        self.assertAlmostEqual(segment.length, 2.0, places=12)
        self.assertAlmostEqual(segment.carleson_constant().value, 2.0, places=6)

    def test_index_of_snaps_to_nearest_sample(self):
        self.assertEqual(self.circle.index_of(1 + 0j), 0)
        self.assertEqual(self.circle.index_of(-1 + 1e-6j), 1024)

    def test_index_of_rejects_points_off_curve(self):
        with self.assertRaises(InputError):
            self.circle.index_of(5 + 0j)
        with self.assertRaises(InputError):
            self.circle.index_of(4096)

    def test_circle_portion_measure(self):
        for radius in (0.01, 0.5, 1.5):
            expected = 4 * math.asin(radius / 2)
            self.assertAlmostEqual(self.circle.portion(0, radius).measure(), expected, delta=1e-4)

    def test_point_at_follows_arclength(self):
        self.assertAlmostEqual(self.circle.point_at(math.pi / 2), 1j, places=12)
        with self.assertRaises(InputError):
            self.circle.point_at(7.0)

    def test_d_max_and_omega_arc(self):
        self.assertAlmostEqual(self.circle.d_max(0), 2.0, places=12)
        arc = self.circle.omega_arc(0, 0.5)
        self.assertAlmostEqual(arc.measure(), 4 * math.asin(0.25), delta=1e-4)
        with self.assertRaises(InputError):
            self.circle.omega_arc(0, 2.5)

    def test_circle_sites_lie_on_the_circle(self):
        sites = self.circle.circle_sites(0, 0.25)
        self.assertEqual(len(sites), 2)
        np.testing.assert_allclose(np.abs(sites.offsets), 0.25, rtol=1e-12)

    def test_arg_branch_is_continuous(self):
        branch = self.circle.arg_branch(0)
        self.assertTrue(math.isnan(branch[0]))
        steps = np.abs(np.diff(branch[1:]))
        self.assertLess(float(np.max(steps)), 0.01)
        self.assertAlmostEqual(float(np.nanmax(branch) - np.nanmin(branch)), math.pi, delta=1e-2)

    def test_eta_values(self):
        eta = self.circle.eta_values(0)
        self.assertTrue(math.isnan(eta[0]))
        self.assertAlmostEqual(float(eta[1024]), math.exp(-math.pi), places=9)
        self.assertAlmostEqual(float(eta[512]), math.exp(-0.75 * math.pi), places=9)

    def test_closed_polyline_is_reoriented(self):
        square = PolylineSampled([-1 - 1j, -1 + 1j, 1 + 1j, 1 - 1j], closed=True, resolution=400)
        self.assertAlmostEqual(square.length, 8.0, places=9)
        self.assertEqual(square.winding_number(0j), 1)
        self.assertEqual(len(square.singular_indices), 4)

    def test_closed_curve_must_surround_origin(self):
        with self.assertRaises(InputError):
            PolylineSampled([2 + 0j, 3 + 0j, 3 + 1j], closed=True, resolution=64)

    def test_open_polyline_ends_are_singular(self):
        path = PolylineSampled([0j, 1 + 0j, 1 + 1j], resolution=101)
        self.assertEqual(path.singular_indices[0], 0)
        self.assertEqual(path.singular_indices[-1], path.resolution - 1)
        self.assertEqual(len(path.singular_indices), 3)

    def test_smooth_jordan_is_resampled_by_arclength(self):
        curve = SmoothJordan([(1, 1 + 0j), (2, 0.1 + 0j)], resolution=512)
        np.testing.assert_allclose(curve.segments, curve.length / 512)
        self.assertEqual(curve.winding_number(0j), 1)

    def test_smooth_jordan_clockwise_is_reversed(self):
        curve = SmoothJordan([(-1, 1 + 0j)], resolution=256)
        self.assertEqual(curve.winding_number(0j), 1)

    def test_config_factory_rejects_unknown_kind(self):
        with self.assertRaises(InputError):
            ConfigFactory().get_curve_config("ellipse")

    def test_config_factory_builds_polyline(self):
        curve = ConfigFactory().get_curve_config("polyline").build(
            {'kind': 'polyline', 'points': [[0, 0], [1, 0]]}, 64)
        self.assertFalse(curve.closed)
        self.assertEqual(curve.resolution, 64)


class SpiralTest(unittest.TestCase):
    def test_spiral_is_attached_at_sample_zero(self):
        spiral = LogSpiralAttached(UnitCircle(512), 1 + 0j, 1.0)
        self.assertTrue(spiral.closed)
        self.assertEqual(spiral.singular_indices, [0])
        self.assertEqual(spiral.attach, 1 + 0j)
        self.assertEqual(spiral.index_of(1 + 0j), 0)

    def test_spirality_of_spiral(self):
        for delta in (0.5, 1.0, 2.0):
            with self.subTest(delta=delta):
                result = spirality(LogSpiralAttached(UnitCircle(512), 1 + 0j, delta), 0)
                self.assertAlmostEqual(result.delta_minus, delta, delta=2e-2)
                self.assertAlmostEqual(result.delta_plus, delta, delta=2e-2)

    def test_spirality_scaling_report(self):
        result = spirality(LogSpiralAttached(UnitCircle(512), 1 + 0j, 2.0), 0)
        self.assertEqual([check.power for check in result.scaling], [-2.0, -1.0, 1.0, 2.0])
        self.assertTrue(result.consistent, "; ".join(str(check) for check in result.scaling))
        for check in result.scaling:
            self.assertAlmostEqual(check.observed.alpha, 2.0 * check.power, delta=4e-2 * abs(check.power))

    def test_spirality_of_smooth_point(self):
        result = spirality(UnitCircle(1024), 0)
        self.assertAlmostEqual(result.delta_minus, 0.0, delta=2e-3)
        self.assertAlmostEqual(result.delta_plus, 0.0, delta=2e-3)
        self.assertTrue(result.consistent)

    def test_spiral_radius_is_checked(self):
        with self.assertRaises(InputError):
            LogSpiralAttached(UnitCircle(256), 1 + 0j, 1.0, radius=1.5)


if __name__ == '__main__':
    unittest.main()
