import unittest

import numpy as np

from stiefel.manifold import StiefelPoint, TangentVector, \
    TangentCoordinates, InvalidArgumentError, InfeasiblePointError
from stiefel.manifold.core import vec, unvec, pack_skew, unpack_skew, \
    skew_dimension, manifold_dimension, project_tangent, project_normal, \
    canonical_inner, canonical_norm, orthonormal_complement, \
    decompose_tangent, assemble_tangent, polar_projection, random_point, \
    random_tangent, injectivity_radius_bound, canonical_speed
from stiefel.tests import StiefelTestCase


class TestPoints(StiefelTestCase):
    def test_feasible_point(self):
        """Test construction of valid points"""
        point = StiefelPoint(np.eye(5, 2))
        self.assertEqual(point.shape, (5, 2))
        self.assertEqual((point.n, point.p), (5, 2))
        self.assertEqual(point.residual(), 0)
        # Data is read-only
        with self.assertRaises(ValueError):
            point.data[0, 0] = 2

    def test_infeasible_point(self):
        """Test rejection of matrices without orthonormal columns"""
        with self.assertRaises(InfeasiblePointError) as cm:
            StiefelPoint(2 * np.eye(4, 2))
        self.assertAlmostEqual(cm.exception.residual, np.sqrt(18))
        self.assertIn('tolerance', str(cm.exception))
        # Accepted with a looser tolerance or without check
        StiefelPoint(np.eye(4, 2) * (1 + 1e-9), tol=1e-6)
        StiefelPoint(2 * np.eye(4, 2), check=False)

    def test_invalid_dimensions(self):
        """Test rejection of p > n and non-matrices"""
        self.assertRaises(InvalidArgumentError, StiefelPoint, np.eye(2, 3))
        self.assertRaises(InvalidArgumentError, StiefelPoint, np.ones(3))

    def test_random_point(self):
        """Test random points: feasible and reproducible"""
        for n, p in [(5, 1), (8, 3), (6, 6)]:
            point = random_point(n, p, seed=3)
            self.assertFeasible(point)
            self.assertMatrixAlmostEqual(point, random_point(n, p, seed=3),
                                         0)
        self.assertRaises(InvalidArgumentError, random_point, 3, 4)


class TestVectorization(StiefelTestCase):
    def test_vec(self):
        """Test column stacking"""
        matrix = np.array([[1, 2, 3], [4, 5, 6]])
        self.assertEqual(list(vec(matrix)), [1, 4, 2, 5, 3, 6])
        self.assertMatrixAlmostEqual(unvec(vec(matrix), 2, 3), matrix, 0)

    def test_skew_packing(self):
        """Test packing of skew-symmetric matrices"""
        omega = np.array([[0, 1, 2], [-1, 0, 3], [-2, -3, 0]], dtype=float)
        # Column by column: (0, 1), (0, 2), (1, 2)
        self.assertEqual(list(pack_skew(omega)), [1, 2, 3])
        self.assertMatrixAlmostEqual(unpack_skew([1, 2, 3], 3), omega, 0)
        self.assertEqual(pack_skew(np.zeros((1, 1))).size, 0)

    def test_dimensions(self):
        """Test dimension formulas"""
        self.assertEqual(skew_dimension(1), 0)
        self.assertEqual(skew_dimension(4), 6)
        self.assertEqual(manifold_dimension(15, 1), 14)
        self.assertEqual(manifold_dimension(15, 15), 105)
        self.assertEqual(manifold_dimension(12, 3), 30)


class TestProjections(StiefelTestCase):
    def setUp(self):
        self.point = random_point(7, 3, seed=1)
        self.matrix = np.random.default_rng(2).standard_normal((7, 3))

    def test_project_tangent(self):
        """Test tangent projection: tangent and idempotent"""
        xi = project_tangent(self.point, self.matrix)
        self.assertTangent(xi, tol=1e-13)
        again = project_tangent(self.point, xi.ambient)
        self.assertMatrixAlmostEqual(again, xi, 1e-13)

    def test_project_normal(self):
        """Test that tangent and normal parts add up to the matrix"""
        xi = project_tangent(self.point, self.matrix)
        normal = project_normal(self.point, self.matrix)
        self.assertMatrixAlmostEqual(xi.ambient + normal, self.matrix, 1e-13)
        # The parts are orthogonal in the Euclidean metric
        self.assertAlmostEqual(np.sum(xi.ambient * normal), 0, places=12)

    def test_dimension_mismatch(self):
        """Test rejection of matrices of the wrong shape"""
        self.assertRaises(InvalidArgumentError, project_tangent, self.point,
                          np.ones((7, 2)))

    def test_non_tangent(self):
        """Test rejection of non-tangent matrices"""
        with self.assertRaises(InvalidArgumentError) as cm:
            TangentVector(self.point, self.point.data)
        self.assertGreater(cm.exception.residual, 1)

    def test_polar_projection(self):
        """Test projection onto the manifold"""
        point = polar_projection(self.matrix)
        self.assertFeasible(point)
        # Points are fixed
        self.assertMatrixAlmostEqual(polar_projection(self.point.data),
                                     self.point, 1e-13)


class TestCanonicalMetric(StiefelTestCase):
    def setUp(self):
        self.point = random_point(6, 2, seed=4)
        self.complement = orthonormal_complement(self.point)

    def test_complement(self):
        """Test the orthonormal complement"""
        basis = np.hstack([self.point.data, self.complement])
        self.assertMatrixAlmostEqual(basis.T @ basis, np.eye(6), 1e-13)
        square = random_point(4, 4, seed=0)
        self.assertEqual(orthonormal_complement(square).shape, (4, 0))

    def test_inner_product_in_coordinates(self):
        """Test that Omega is weighted once: ||xi||^2 = |Omega|^2/2 + |K|^2
        """
        omega = np.array([[0, 0.3], [-0.3, 0]])
        k = np.arange(8, dtype=float).reshape(4, 2) / 10
        coords = TangentCoordinates(self.point, omega, k, self.complement)
        xi = assemble_tangent(coords)
        expected = np.sum(omega ** 2) / 2 + np.sum(k ** 2)
        self.assertAlmostEqual(canonical_inner(self.point, xi, xi), expected,
                               places=13)
        self.assertAlmostEqual(canonical_norm(self.point, xi) ** 2, expected,
                               places=13)
        self.assertAlmostEqual(canonical_speed(self.point.data, xi.ambient),
                               canonical_norm(self.point, xi), places=14)

    def test_inner_product_symmetric(self):
        """Test symmetry and bilinearity of the metric"""
        xi = random_tangent(self.point, 1.0, seed=1)
        zeta = random_tangent(self.point, 2.0, seed=2)
        self.assertAlmostEqual(canonical_inner(self.point, xi, zeta),
                               canonical_inner(self.point, zeta, xi),
                               places=14)
        self.assertAlmostEqual(
            canonical_inner(self.point, xi.scaled(3), zeta),
            3 * canonical_inner(self.point, xi, zeta), places=13)

    def test_inner_product_other_base(self):
        """Test rejection of vectors based at another point"""
        other = random_point(6, 2, seed=5)
        xi = random_tangent(other, 1.0, seed=1)
        self.assertRaises(InvalidArgumentError, canonical_inner, self.point,
                          xi, xi)

    def test_random_tangent(self):
        """Test random tangent vectors of prescribed length"""
        for norm in [0.0, 0.5, 3.0]:
            xi = random_tangent(self.point, norm, seed=7)
            self.assertTangent(xi, tol=1e-13)
            self.assertAlmostEqual(canonical_norm(self.point, xi), norm,
                                   places=13)
        self.assertRaises(InvalidArgumentError, random_tangent, self.point,
                          -1)


class TestCoordinates(StiefelTestCase):
    def test_decompose_assemble(self):
        """Test the decomposition xi = X Omega + X_perp K"""
        point = random_point(8, 3, seed=11)
        xi = random_tangent(point, 1.5, seed=12)
        coords = decompose_tangent(xi)
        self.assertMatrixAlmostEqual(coords.omega, -coords.omega.T, 0)
        self.assertEqual(coords.k.shape, (5, 3))
        self.assertMatrixAlmostEqual(assemble_tangent(coords), xi, 1e-13)

    def test_packed(self):
        """Test packing of the coordinates"""
        point = random_point(8, 3, seed=11)
        coords = decompose_tangent(random_tangent(point, 1.0, seed=3))
        packed = coords.packed
        self.assertEqual(packed.size, manifold_dimension(8, 3))
        again = TangentCoordinates.from_packed(point, coords.complement,
                                               packed)
        self.assertMatrixAlmostEqual(again.omega, coords.omega, 0)
        self.assertMatrixAlmostEqual(again.k, coords.k, 0)
        self.assertRaises(InvalidArgumentError,
                          TangentCoordinates.from_packed, point,
                          coords.complement, packed[1:])

    def test_decompose_non_tangent(self):
        """Test rejection of non-tangent matrices"""
        point = random_point(5, 2, seed=1)
        xi = TangentVector(point, point.data, check=False)
        self.assertRaises(InvalidArgumentError, decompose_tangent, xi)

    def test_injectivity_radius(self):
        """Test the injectivity radius bound"""
        self.assertAlmostEqual(injectivity_radius_bound() / np.pi, 0.8944,
                               places=4)


if __name__ == '__main__':
    unittest.main()
