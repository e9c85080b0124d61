import unittest

import numpy as np

from stiefel.applications.karcher import KarcherConfig, karcher_iterate, \
    karcher_mean, logarithm
from stiefel.manifold import StiefelPoint, InvalidArgumentError
from stiefel.manifold.core import random_point, random_tangent
from stiefel.manifold.geodesic import stiefel_exp
from stiefel.settings import Settings
from stiefel.shooting import ShootingConfig, LogFailedError
from stiefel.shooting.leapfrog import LFMSConfig
from stiefel.tests import StiefelTestCase


def scattered(center, count, radius, seed):
    return [stiefel_exp(center, random_tangent(center, radius,
                                               seed + i)).point
            for i in range(count)]


class TestKarcherMean(StiefelTestCase):
    def test_two_points(self):
        """Test that the mean of two points is the geodesic midpoint"""
        start = random_point(6, 2, seed=0)
        xi = random_tangent(start, 1.0, seed=1)
        end = stiefel_exp(start, xi).point
        mean = karcher_mean([start, end], KarcherConfig(tol=1e-11))
        self.assertMatrixAlmostEqual(mean, stiefel_exp(start, xi, 0.5).point,
                                     1e-8)

    def test_single_point(self):
        """Test the mean of a single point"""
        point = random_point(5, 2, seed=2)
        result = karcher_iterate([point])
        self.assertTrue(result.converged)
        self.assertEqual(result.iterations, 1)
        self.assertMatrixAlmostEqual(result.mean, point, 1e-12)

    def test_stationary(self):
        """Test that the gradient vanishes at the mean"""
        points = scattered(random_point(7, 3, seed=3), 4, 0.4, seed=4)
        config = KarcherConfig(tol=1e-10)
        result = karcher_iterate(points, config)
        self.assertTrue(result.converged)
        self.assertLessEqual(result.gradient_norm, 1e-10)
        self.assertFeasible(result.mean)

    def test_order(self):
        """Test that the mean does not depend on the order of the points"""
        points = scattered(random_point(6, 2, seed=5), 3, 0.3, seed=6)
        config = KarcherConfig(tol=1e-11)
        first = karcher_mean(points, config)
        second = karcher_mean(points[::-1], config)
        self.assertMatrixAlmostEqual(first, second, 1e-9)

    def test_invalid(self):
        """Test rejection of empty and mixed sets"""
        self.assertRaises(InvalidArgumentError, karcher_mean, [])
        self.assertRaises(InvalidArgumentError, karcher_mean,
                          [random_point(5, 2), random_point(5, 3)])

    def test_not_converged(self):
        """Test the iteration budget"""
        points = scattered(random_point(6, 2, seed=7), 3, 0.5, seed=8)
        config = KarcherConfig(max_iter=1)
        with self.assertLogs('Applications', 'WARNING'):
            result = karcher_iterate(points, config)
        self.assertFalse(result.converged)
        with self.assertLogs('Applications', 'WARNING'):
            self.assertRaises(LogFailedError, karcher_mean, points, config)


class TestLogarithm(StiefelTestCase):
    def test_failure(self):
        """Test that a failed logarithm names the pair"""
        start = StiefelPoint(np.eye(3, 1))
        with self.assertRaises(LogFailedError) as cm:
            logarithm(start, StiefelPoint(-np.eye(3, 1)), KarcherConfig(),
                      'first, second')
        self.assertEqual(cm.exception.label, 'first, second')
        self.assertIn('stagnated', str(cm.exception))

    def test_fallback(self):
        """Test the LFMS fallback after a failed single shooting run"""
        start = StiefelPoint(np.eye(6, 2))
        eta = random_tangent(start, 0.6 * np.pi, seed=9)
        end = stiefel_exp(start, eta).point
        config = KarcherConfig(shooting=ShootingConfig(max_iter=1),
                               lfms=LFMSConfig())
        with self.assertLogs('Applications', 'WARNING'):
            xi = logarithm(start, end, config, 'pair')
        self.assertMatrixAlmostEqual(xi, eta, 1e-9)

    def test_from_settings(self):
        """Test the configuration from application settings"""
        settings = Settings(values={'karcher': {'tol': 1e-6},
                                    'shooting': {'max_iter': 4}})
        config = KarcherConfig.from_settings(settings)
        self.assertEqual(config.tol, 1e-6)
        self.assertEqual(config.max_iter, 100)
        self.assertEqual(config.shooting.max_iter, 4)
        self.assertIsNone(config.lfms)


if __name__ == '__main__':
    unittest.main()
