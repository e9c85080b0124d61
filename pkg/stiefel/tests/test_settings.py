import json
import os
import tempfile
import unittest

from stiefel.applications.karcher import KarcherConfig
from stiefel.manifold import InvalidArgumentError
from stiefel.settings import Settings
from stiefel.shooting import ShootingConfig
from stiefel.shooting.leapfrog import LFMSConfig
from stiefel.shooting.multiple import MultipleShootingConfig


class SettingsTests(unittest.TestCase):
    """Tests for the stiefel.settings module"""

    def test_defaults(self):
        """Test the default values"""
        settings = Settings()
        self.assertEqual(settings['shooting/max_iter'], 10)
        self.assertEqual(settings['lfms/lf_handover_tol'], 1e-3)
        self.assertIn('karcher', settings)
        self.assertIn('karcher/tol', settings)
        self.assertNotIn('karcher/seed', settings)
        self.assertNotIn('plotting', settings)

    def test_file(self):
        """Test overriding the defaults from a JSON file"""
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'settings.json')
            with open(path, 'w') as f:
                json.dump({'shooting': {'tol_residual': 1e-10}}, f)
            settings = Settings(path, {'shooting': {'max_iter': 20}})
        self.assertEqual(settings['shooting/tol_residual'], 1e-10)
        self.assertEqual(settings['shooting/max_iter'], 20)
        # Untouched keys of the section keep their defaults
        self.assertEqual(settings['shooting/use_reduced'], 'auto')

    def test_invalid_file(self):
        """Test rejection of malformed configuration files"""
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'settings.json')
            with open(path, 'w') as f:
                f.write('{"shooting": ')
            self.assertRaises(InvalidArgumentError, Settings, path)
            with open(path, 'w') as f:
                f.write('[1, 2]')
            self.assertRaises(InvalidArgumentError, Settings, path)

    def test_items(self):
        """Test item access and conversions"""
        settings = Settings()
        settings['karcher/tol'] = '1e-6'
        self.assertEqual(settings.get_float('karcher/tol'), 1e-6)
        self.assertEqual(settings.get_int('missing/key', '3'), 3)
        self.assertIsNone(settings.get('missing/key'))
        del settings['karcher/tol']
        self.assertNotIn('karcher/tol', settings)
        settings['karcher'] = {'tol': 1}
        self.assertEqual(settings.section('karcher'), {'tol': 1})
        self.assertRaises(InvalidArgumentError, settings.get_float,
                          'shooting/use_reduced')

    def test_sections_build_configs(self):
        """Test that every default section is accepted by its config"""
        settings = Settings()
        self.assertEqual(ShootingConfig.from_settings(settings).max_iter, 10)
        self.assertEqual(MultipleShootingConfig.from_settings(settings).tol,
                         1e-12)
        self.assertEqual(LFMSConfig.from_settings(settings).lf_max_m, 16)

    def test_typed_sections(self):
        """Test conversion of numeric values given as strings"""
        settings = Settings(values={
            'shooting': {'max_iter': '20', 'tol_residual': '1e-10'},
            'lfms': {'lf_initial_m': 4.0},
            'karcher': {'tol': '1e-6'}})
        self.assertEqual(settings.typed_section('lfms', ints=['lf_max_m',
                                                             'missing']),
                         dict(settings.section('lfms'), lf_max_m=16))
        config = ShootingConfig.from_settings(settings)
        self.assertEqual(config.max_iter, 20)
        self.assertEqual(config.tol_residual, 1e-10)
        self.assertEqual(LFMSConfig.from_settings(settings).lf_initial_m, 4)
        self.assertEqual(KarcherConfig.from_settings(settings).tol, 1e-6)

    def test_invalid_values(self):
        """Test rejection of values that are not numbers"""
        for values in [{'shooting': {'max_iter': 'ten'}},
                       {'multiple_shooting': {'tol': None}},
                       {'lfms': {'lf_max_m': [16]}}]:
            settings = Settings(values=values)
            with self.assertRaises(InvalidArgumentError):
                ShootingConfig.from_settings(settings)
                MultipleShootingConfig.from_settings(settings)
                LFMSConfig.from_settings(settings)


if __name__ == '__main__':
    unittest.main()
