import os
import tempfile
import unittest
from unittest import mock

from nakano_fredholm import InputError
from nakano_fredholm.app.run_arg import RunArg


class RunArgTest(unittest.TestCase):
    def test_of_list(self):
        with tempfile.NamedTemporaryFile(suffix='.toml') as scene:
            run_args = RunArg.of_list(source=['fredholm', '-c', scene.name, '--tol', '0.01', '-v',
                                              '--seed', '-3'])
            self.assertEqual(run_args[RunArg.COMMAND], 'fredholm')
            self.assertTrue(os.path.isabs(run_args[RunArg.CONFIG]))
            self.assertTrue(run_args[RunArg.CONFIG].endswith(os.path.basename(scene.name)))
        self.assertEqual(run_args[RunArg.TOL], 0.01)
        self.assertIs(run_args[RunArg.VERBOSE], True)
        self.assertEqual(run_args[RunArg.SEED], -3)

    def test_command_after_flags(self):
        run_args = RunArg.of_list(source=['-g', '13', 'indices'])
        self.assertEqual(run_args[RunArg.COMMAND], 'indices')
        self.assertEqual(run_args[RunArg.GRID_DECADES], 13)

    def test_unknown_option(self):
        with self.assertRaises(InputError):
            RunArg.of_list(source=['carleson', '--colour', 'red'])

    def test_option_needs_value(self):
        with self.assertRaises(InputError):
            RunArg.of_list(source=['carleson', '--tol'])

    def test_bad_int(self):
        with self.assertRaises(InputError):
            RunArg.of_list(source=['validate', '--seed', 'seven'])

    def test_defaults(self):
        self.assertEqual(RunArg.get({}, RunArg.TOL), 1e-3)
        self.assertEqual(RunArg.get({}, RunArg.GRID_DECADES), 12)
        self.assertEqual(RunArg.get({}, RunArg.SEED), 0)
        self.assertIsNone(RunArg.get({}, RunArg.CONFIG))

    def test_out_dir_comes_from_environment(self):
        with mock.patch.dict(os.environ, {'NAKANO_FREDHOLM_OUT_DIR': '/tmp/scenes-out'}):
            self.assertEqual(RunArg.get({}, RunArg.OUT), '/tmp/scenes-out')
        self.assertEqual(RunArg.get({RunArg.OUT: 'mine'}, RunArg.OUT), 'mine')

    def test_every_option_has_a_parsed_kind(self):
        for run_arg in RunArg:
            with self.subTest(run_arg=run_arg.value):
                self.assertIn(run_arg.type, ('str', 'bool', 'int', 'float'))

    def test_value_of(self):
        self.assertEqual(RunArg.value_of('t', '0.5'), 0.5)
        self.assertIs(RunArg.value_of('verbose', 'false'), False)


if __name__ == '__main__':
    unittest.main()
