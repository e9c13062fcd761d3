import os
import tempfile
import unittest

from nakano_fredholm import CurveKind, InputError, Power, SceneConfig


def circle_scene(**extra):
    document = {'schema': 1, 'curve': {'kind': 'unit_circle'}}
    document.update(extra)
    return document


class SceneConfigTest(unittest.TestCase):
    def test_minimal_scene(self):
        scene = SceneConfig.of_dict(circle_scene(exponent=2), resolution=256)
        self.assertEqual(scene.curve.kind, CurveKind.UNIT_CIRCLE)
        self.assertEqual(scene.curve.resolution, 256)
        self.assertEqual(scene.exponent.p_min, 2.0)
        self.assertEqual(scene.weight.factors, [])
        self.assertEqual(scene.tol, 1e-3)
        self.assertEqual(scene.decades, 12)

    def test_curve_resolution_overrides_default(self):
        document = {'schema': 1, 'curve': {'kind': 'unit_circle', 'resolution': 128}}
        self.assertEqual(SceneConfig.of_dict(document, resolution=256).curve.resolution, 128)

    def test_schema_is_required(self):
        with self.assertRaises(InputError) as context:
            SceneConfig.of_dict({'curve': {'kind': 'unit_circle'}}, resolution=64)
        self.assertIn("schema", str(context.exception))

    def test_unknown_curve_kind(self):
        with self.assertRaises(InputError) as context:
            SceneConfig.of_dict({'schema': 1, 'curve': {'kind': 'ellipse'}}, resolution=64)
        self.assertIn("ellipse", str(context.exception))

    def test_missing_weight_parameter_names_its_path(self):
        document = circle_scene(exponent=2, weight=[{'kind': 'power', 'at': [1, 0]}])
        with self.assertRaises(InputError) as context:
            SceneConfig.of_dict(document, 'scene.toml', resolution=256)
        self.assertIn("scene.toml", str(context.exception))
        self.assertIn("weight[0].lambda", str(context.exception))

    def test_fields_of_the_wrong_type_name_their_path(self):
        cases = {
            'exponent': circle_scene(exponent="two"),
            'exponent.nodes[0]': circle_scene(exponent={'kind': 'table', 'nodes': [1, 2]}),
            'exponent.value': circle_scene(exponent={'kind': 'formula', 'name': 'constant', 'value': "x"}),
            'weight[0]': circle_scene(exponent=2, weight=[1]),
            'weight[0].lambda': circle_scene(exponent=2, weight=[{'kind': 'power', 'at': [1, 0], 'lambda': "a"}]),
            'weight[0].radii[1]': circle_scene(exponent=2, weight=[
                {'kind': 'radial', 'at': [1, 0], 'radii': [0.1, "b"], 'values': [1, 2]}]),
            'symbols.a.jumps[0]': circle_scene(symbols={'a': {'kind': 'jumps', 'jumps': [3]}}),
            'symbols.a.nodes[0][1]': circle_scene(symbols={'a': {'kind': 'table', 'nodes': [[0, "re", 0]]}}),
            'lab.orders[0]': circle_scene(lab={'orders': ["a"]}),
            'grids.decades': circle_scene(grids={'decades': "12"}),
            'points.at': circle_scene(points={'at': 3}),
            'curve.resolution': {'schema': 1, 'curve': {'kind': 'unit_circle', 'resolution': "big"}},
            'curve.points[1]': {'schema': 1, 'curve': {'kind': 'polyline', 'points': [[0, 0], 1]}},
            'curve.attach': {'schema': 1, 'curve': {'kind': 'log_spiral', 'delta': 1, 'attach': "here"}},
        }
        for where, document in cases.items():
            with self.subTest(where=where):
                with self.assertRaises(InputError) as context:
                    SceneConfig.of_dict(document, 'scene.toml', resolution=256)
                self.assertIn(f"{where}:", str(context.exception))

    def test_weight_factors(self):
        document = circle_scene(exponent=3, weight=[
            {'kind': 'power', 'at': [1, 0], 'lambda': 0.25},
            {'kind': 'eta', 'at': [-1, 0], 'x': 0.5},
        ])
        scene = SceneConfig.of_dict(document, resolution=256)
        self.assertEqual(len(scene.weight.factors), 2)
        self.assertIsInstance(scene.weight.factors[0], Power)
        self.assertEqual(scene.weight.factors[0].exponent, 0.25)

    def test_weight_point_must_lie_on_curve(self):
        document = circle_scene(exponent=2, weight=[{'kind': 'power', 'at': [3, 0], 'lambda': 0.25}])
        with self.assertRaises(InputError) as context:
            SceneConfig.of_dict(document, resolution=256)
        self.assertIn("weight[0].at", str(context.exception))

    def test_jump_symbols(self):
        document = circle_scene(exponent=2, symbols={
            'a': {'kind': 'jumps', 'jumps': [{'at': [1, 0], 'left': 1, 'right': [-1, 0]}]},
            'b': 2,
        })
        scene = SceneConfig.of_dict(document, resolution=256)
        a, b = scene.symbols()
        self.assertEqual(len(a.jumps()), 1)
        self.assertEqual(a.limits(0), (1 + 0j, -1 + 0j))
        self.assertEqual(b.jumps(), [])

    def test_missing_b_defaults_to_one(self):
        document = circle_scene(exponent=2, symbols={'a': 3})
        _, b = SceneConfig.of_dict(document, resolution=256).symbols()
        self.assertEqual(b.limits(0), (1 + 0j, 1 + 0j))

    def test_symbols_are_required_on_demand(self):
        scene = SceneConfig.of_dict(circle_scene(exponent=2), resolution=256)
        with self.assertRaises(InputError):
            scene.symbols()

    def test_space_needs_exponent(self):
        scene = SceneConfig.of_dict(circle_scene(), resolution=256)
        with self.assertRaises(InputError) as context:
            _ = scene.space
        self.assertIn("exponent", str(context.exception))

    def test_exponent_formula(self):
        document = circle_scene(exponent={'kind': 'formula', 'name': 'cosine', 'start': 2, 'end': 3})
        scene = SceneConfig.of_dict(document, resolution=256)
        self.assertAlmostEqual(scene.exponent.p_min, 2.0, places=9)

    def test_overrides_replace_scene_values(self):
        document = circle_scene(exponent=2, tolerances={'margin': 0.01}, grids={'decades': 13})
        scene = SceneConfig.of_dict(document, resolution=256)
        self.assertEqual((scene.tol, scene.decades), (0.01, 13))
        scene = SceneConfig.of_dict(document, tol=0.002, decades=14, resolution=256)
        self.assertEqual((scene.tol, scene.decades), (0.002, 14))

    def test_lab_settings(self):
        scene = SceneConfig.of_dict(circle_scene(lab={'orders': [8, 16, 32, 64], 'jumps': 5}), resolution=256)
        self.assertEqual(scene.lab.orders, [8, 16, 32, 64])
        self.assertEqual(scene.lab.jumps, 5)
        self.assertEqual(scene.lab.pairs, 50)

    def test_focus_points(self):
        weighted = SceneConfig.of_dict(circle_scene(
            exponent=2, weight=[{'kind': 'power', 'at': [-1, 0], 'lambda': 0.25}]), resolution=256)
        self.assertEqual(len(weighted.focus_points()), 1)
        self.assertAlmostEqual(weighted.focus_points()[0], -1 + 0j, places=12)
        plain = SceneConfig.of_dict(circle_scene(exponent=2), resolution=256)
        self.assertEqual(plain.focus_points(), [1 + 0j])
        explicit = SceneConfig.of_dict(circle_scene(points={'at': [[0, 1]]}), resolution=256)
        self.assertAlmostEqual(explicit.focus_points()[0], 1j, places=12)


class SceneFileTest(unittest.TestCase):
    def setUp(self):
        self.dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.dir.cleanup()

    def write(self, text: str) -> str:
        path = os.path.join(self.dir.name, 'scene.toml')
        with open(path, 'w') as file:
            file.write(text)
        return path

    def test_load(self):
        path = self.write('schema = 1\nexponent = 2.5\n\n[curve]\nkind = "unit_circle"\nresolution = 64\n')
        scene = SceneConfig.load(path)
        self.assertEqual(scene.path, path)
        self.assertEqual(scene.curve.resolution, 64)
        self.assertEqual(scene.exponent.p_max, 2.5)

    def test_malformed_toml(self):
        path = self.write('schema = 1\n[curve\n')
        with self.assertRaises(InputError):
            SceneConfig.load(path)

    def test_missing_file(self):
        with self.assertRaises(InputError):
            SceneConfig.load(os.path.join(self.dir.name, 'missing.toml'))


if __name__ == '__main__':
    unittest.main()
