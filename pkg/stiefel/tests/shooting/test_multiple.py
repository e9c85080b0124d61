import unittest
from unittest import mock

import numpy as np

from stiefel.manifold import StiefelPoint, InvalidArgumentError
from stiefel.manifold.core import random_point, random_tangent, vec, \
    polar_projection
from stiefel.manifold.geodesic import stiefel_exp
from stiefel.shooting import REASON_CONVERGED, multiple
from stiefel.shooting.multiple import BrokenGeodesic, \
    MultipleShootingConfig, propagate_segment, residual_F, \
    segment_mismatches, segment_jacobian, condensed_solve, dense_solve, \
    assemble_full_jacobian, multiple_shoot
from stiefel.shooting.single import stiefel_log
from stiefel.tests import StiefelTestCase


def endpoints(n, p, d, seed):
    start = StiefelPoint(np.eye(n, p))
    eta = random_tangent(start, d, seed)
    return start, stiefel_exp(start, eta).point, eta


def perturbed(broken, size, seed):
    """Move interior junctions and all velocities by about ``size``"""
    rng = np.random.default_rng(seed)
    sigma1 = list(broken.sigma1)
    for k in range(1, broken.m - 1):
        noise = rng.standard_normal(sigma1[k].shape)
        sigma1[k] = polar_projection(sigma1[k] + size * noise).data
    sigma2 = [s + size * rng.standard_normal(s.shape)
              for s in broken.sigma2]
    return BrokenGeodesic(sigma1, sigma2)


class TestBrokenGeodesic(StiefelTestCase):
    def test_validation(self):
        """Test the checks on the junction data"""
        point = np.eye(4, 2)
        self.assertRaises(InvalidArgumentError, BrokenGeodesic, [point],
                          [point])
        self.assertRaises(InvalidArgumentError, BrokenGeodesic,
                          [point, point], [point])
        self.assertRaises(InvalidArgumentError, BrokenGeodesic,
                          [point, point], [point, np.eye(4, 3)])

    def test_vector(self):
        """Test the layout of the unknown vector"""
        rng = np.random.default_rng(0)
        sigma1 = [rng.standard_normal((5, 2)) for _ in range(3)]
        sigma2 = [rng.standard_normal((5, 2)) for _ in range(3)]
        broken = BrokenGeodesic(sigma1, sigma2)
        vector = broken.to_vector()
        self.assertEqual(vector.size, 2 * 3 * 5 * 2)
        self.assertMatrixAlmostEqual(vector[10:20], vec(sigma2[0]), 0)
        self.assertMatrixAlmostEqual(vector[20:30], vec(sigma1[1]), 0)
        again = BrokenGeodesic.from_vector(vector, 3, 5, 2)
        self.assertMatrixAlmostEqual(again.sigma2[2], sigma2[2], 0)

    def test_sample_geodesic(self):
        """Test that a sampled geodesic solves the system"""
        start, end, eta = endpoints(6, 2, 0.6 * np.pi, seed=1)
        for m in [2, 3, 5]:
            broken = BrokenGeodesic.sample_geodesic(start, eta, m)
            self.assertEqual(broken.m, m)
            self.assertLess(np.linalg.norm(residual_F(broken, start, end)),
                            1e-12)
            self.assertAlmostEqual(broken.length(), 0.6 * np.pi, places=12)
            self.assertLess(broken.drift(), 1e-14)
            self.assertEqual(len(segment_mismatches(broken)), m - 1)

    def test_infeasible_junction(self):
        """Test that the residual rejects an infeasible junction"""
        start, end, eta = endpoints(5, 2, 1.0, seed=2)
        broken = BrokenGeodesic.sample_geodesic(start, eta, 3)
        broken.sigma1[1] = 1.01 * broken.sigma1[1]
        self.assertRaises(InvalidArgumentError, residual_F, broken, start,
                          end)
        self.assertRaises(InvalidArgumentError, residual_F, broken, start,
                          random_point(5, 3))


class TestSegmentJacobian(StiefelTestCase):
    H = 1e-6

    def _segment(self, vector, n, p):
        z1, z2 = propagate_segment(vector[:n * p].reshape((n, p), order='F'),
                                   vector[n * p:].reshape((n, p), order='F'))
        return np.concatenate([vec(z1), vec(z2)])

    def test_propagate(self):
        """Test the segment map on a feasible junction"""
        start = random_point(6, 2, seed=3)
        xi = random_tangent(start, 1.1, seed=4)
        z1, z2 = propagate_segment(start.data, xi.ambient)
        sample = stiefel_exp(start, xi)
        self.assertMatrixAlmostEqual(z1, sample.point, 1e-12)
        self.assertMatrixAlmostEqual(z2, sample.velocity, 1e-12)

    def test_finite_differences(self):
        """Test all four blocks against central finite differences"""
        for n, p in [(6, 2), (5, 3)]:
            for seed in range(5):
                sigma1 = random_point(n, p, seed=seed).data
                # Junction velocities are only approximately tangent
                sigma2 = np.random.default_rng(seed).standard_normal((n, p))
                jacobian = segment_jacobian(sigma1, sigma2).matrix
                x = np.concatenate([vec(sigma1), vec(sigma2)])
                numeric = np.empty_like(jacobian)
                for j in range(x.size):
                    step = np.zeros(x.size)
                    step[j] = self.H
                    numeric[:, j] = (self._segment(x + step, n, p) -
                                     self._segment(x - step, n, p)) / \
                        (2 * self.H)
                error = np.linalg.norm(jacobian - numeric) / \
                    np.linalg.norm(jacobian)
                self.assertLess(error, 1e-5, 'St({}, {}), seed {}'
                                .format(n, p, seed))

    def test_tangent_velocity(self):
        """Test the skew generator path against the block exponential"""
        for n, p in [(6, 2), (8, 3)]:
            start = random_point(n, p, seed=n)
            sigma2 = random_tangent(start, 1.3, seed=n + 1).ambient
            with mock.patch.object(multiple, 'jacobian_exp_block',
                                   wraps=multiple.jacobian_exp_block) as block:
                jacobian = segment_jacobian(start.data, sigma2).matrix
            block.assert_not_called()
            with mock.patch.object(multiple, 'SKEW_TOLERANCE', -1.0):
                expected = segment_jacobian(start.data, sigma2).matrix
            self.assertMatrixAlmostEqual(jacobian, expected, 1e-10)
            x = np.concatenate([vec(start.data), vec(sigma2)])
            for j in [0, n * p - 1, n * p, 2 * n * p - 1]:
                step = np.zeros(x.size)
                step[j] = self.H
                numeric = (self._segment(x + step, n, p) -
                           self._segment(x - step, n, p)) / (2 * self.H)
                self.assertMatrixAlmostEqual(jacobian[:, j], numeric, 1e-6)

    def test_blocks(self):
        """Test the shapes of the blocks"""
        jacobian = segment_jacobian(np.eye(5, 2), np.eye(5, 2, -2))
        self.assertEqual(jacobian.j11.shape, (10, 10))
        self.assertEqual(jacobian.matrix.shape, (20, 20))
        self.assertMatrixAlmostEqual(jacobian.matrix[:10, 10:], jacobian.j12,
                                     0)


class TestLinearSolve(StiefelTestCase):
    def test_condensed_against_dense(self):
        """Test the condensed solve against the dense system"""
        rng = np.random.default_rng(5)
        for n, p in [(4, 1), (6, 2)]:
            for m in [2, 3, 4]:
                start, _, eta = endpoints(n, p, 0.7 * np.pi, seed=m)
                broken = BrokenGeodesic.sample_geodesic(start, eta, m)
                jacobians = [segment_jacobian(broken.sigma1[k],
                                              broken.sigma2[k])
                             for k in range(m - 1)]
                f = rng.standard_normal(2 * m * n * p)
                condensed = condensed_solve(jacobians, f)
                dense = dense_solve(jacobians, f)
                self.assertLessEqual(np.linalg.norm(condensed - dense),
                                     1e-9 * max(1, np.linalg.norm(dense)))

    def test_full_jacobian(self):
        """Test the block structure of the dense Jacobian"""
        g = [np.full((4, 4), 2.0), np.full((4, 4), 3.0)]
        full = assemble_full_jacobian(g)
        self.assertEqual(full.shape, (12, 12))
        self.assertMatrixAlmostEqual(full[4:8, 4:8], g[1], 0)
        self.assertMatrixAlmostEqual(full[:4, 4:8], -np.eye(4), 0)
        # Boundary conditions on the first and the last junction point
        self.assertMatrixAlmostEqual(full[8:10, :2], np.eye(2), 0)
        self.assertMatrixAlmostEqual(full[10:, 8:10], np.eye(2), 0)
        self.assertEqual(np.count_nonzero(full[8:]), 4)


class TestMultipleShooting(StiefelTestCase):
    def test_already_solved(self):
        """Test that a sampled geodesic needs no Newton step"""
        start, end, eta = endpoints(6, 2, 0.6 * np.pi, seed=6)
        broken = BrokenGeodesic.sample_geodesic(start, eta, 3)
        report = multiple_shoot(broken, start, end)
        self.assertTrue(report.converged)
        self.assertEqual(report.iterations, 0)
        self.assertMatrixAlmostEqual(report.xi, eta, 1e-12)

    def test_perturbed_geodesic(self):
        """Test convergence from a perturbed broken geodesic"""
        start, end, eta = endpoints(6, 2, 0.6 * np.pi, seed=7)
        broken = perturbed(BrokenGeodesic.sample_geodesic(start, eta, 3),
                           1e-3, seed=8)
        report = multiple_shoot(broken, start, end)
        self.assertTrue(report.converged)
        self.assertEqual(report.reason, REASON_CONVERGED)
        self.assertLessEqual(report.f_history[-1], 1e-12)
        self.assertLessEqual(report.iterations, 10)
        self.assertAlmostEqual(report.distance, 0.6 * np.pi, delta=1e-9)
        self.assertMatrixAlmostEqual(report.xi, stiefel_log(start, end).xi,
                                     1e-8)
        self.assertTangent(report.xi, start)
        self.assertEqual(len(report.segment_mismatches), 2)
        self.assertLess(report.drift, 1e-10)

    def test_max_iterations(self):
        """Test the report when the iteration budget runs out"""
        start, end, eta = endpoints(6, 2, 0.6 * np.pi, seed=9)
        broken = perturbed(BrokenGeodesic.sample_geodesic(start, eta, 4),
                           1e-2, seed=10)
        config = MultipleShootingConfig(max_iter=1)
        with self.assertLogs('MultipleShooting', 'WARNING'):
            report = multiple_shoot(broken, start, end, config)
        self.assertFalse(report.converged)
        self.assertEqual(report.reason, 'max-iterations')
        self.assertEqual(len(report.f_history), 2)
        self.assertIsNone(report.xi)
        self.assertEqual(report.as_dict()['m'], 4)

    def test_config(self):
        """Test validation of the settings"""
        self.assertRaises(InvalidArgumentError, MultipleShootingConfig,
                          tol=0)
        self.assertRaises(InvalidArgumentError, MultipleShootingConfig,
                          max_iter=0)


if __name__ == '__main__':
    unittest.main()
