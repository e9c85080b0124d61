import io
import unittest

import numpy as np
import scipy.linalg

from stiefel.applications.shapes import PointSet2D, affine_standardize, \
    shape_geodesic, shape_mean, load_point_set
from stiefel.manifold import InvalidArgumentError
from stiefel.shooting.single import stiefel_distance
from stiefel.tests import StiefelTestCase


def random_shape(n, seed):
    rng = np.random.default_rng(seed)
    return PointSet2D(rng.standard_normal((n, 2)) + [3.0, -1.0])


def nearby(shape, size, seed):
    rng = np.random.default_rng(seed)
    return PointSet2D(shape.points + size * rng.standard_normal(
        shape.points.shape))


class TestPointSet(StiefelTestCase):
    def test_validation(self):
        """Test the checks of PointSet2D"""
        self.assertRaises(InvalidArgumentError, PointSet2D, np.ones((4, 3)))
        self.assertRaises(InvalidArgumentError, PointSet2D, np.ones(4))
        # Orthonormal but not centered
        self.assertRaises(InvalidArgumentError, PointSet2D, np.eye(4, 2),
                          True)
        self.assertRaises(InvalidArgumentError,
                          random_shape(5, 0).as_point)

    def test_load(self):
        """Test reading a point set"""
        shape = load_point_set(io.StringIO('0,0\n1,0\n0,2\n'))
        self.assertEqual(shape.n, 3)
        self.assertFalse(shape.standardized)
        self.assertMatrixAlmostEqual(shape.points[2], np.array([0, 2]), 0)


class TestStandardize(StiefelTestCase):
    def test_standardized(self):
        """Test centering and whitening"""
        shape = affine_standardize(random_shape(12, 1))
        self.assertTrue(shape.standardized)
        self.assertLess(np.linalg.norm(shape.points.mean(axis=0)), 1e-14)
        self.assertFeasible(shape.as_point())

    def test_idempotent(self):
        """Test that standardized shapes are left alone"""
        shape = affine_standardize(random_shape(12, 2))
        self.assertMatrixAlmostEqual(affine_standardize(shape).points,
                                     shape.points, 1e-12)

    def test_affine_invariance(self):
        """Test that affine images agree up to an orthogonal factor"""
        shape = random_shape(10, 3)
        matrix = np.array([[2.0, 0.5], [-0.3, 1.2]])
        image = PointSet2D(shape.points @ matrix + [5.0, 7.0])
        first = affine_standardize(shape).points
        second = affine_standardize(image).points
        rotation, _ = scipy.linalg.orthogonal_procrustes(first, second)
        self.assertMatrixAlmostEqual(first @ rotation, second, 1e-10)

    def test_collinear(self):
        """Test rejection of collinear point sets"""
        shape = PointSet2D([[0, 0], [1, 1], [2, 2], [-1, -1]])
        self.assertRaises(InvalidArgumentError, affine_standardize, shape)


class TestShapeGeodesic(StiefelTestCase):
    def setUp(self):
        shape = random_shape(10, 4)
        self.start = affine_standardize(shape)
        self.end = affine_standardize(nearby(shape, 0.3, seed=5))

    def test_equidistant(self):
        """Test that the intermediate shapes are equally spaced"""
        shapes = shape_geodesic(self.start, self.end, 3)
        self.assertEqual(len(shapes), 3)
        total = stiefel_distance(self.start.as_point(), self.end.as_point())
        for i, shape in enumerate(shapes, start=1):
            self.assertTrue(shape.standardized)
            self.assertAlmostEqual(
                stiefel_distance(self.start.as_point(), shape.as_point()),
                i * total / 4, delta=1e-8)

    def test_count(self):
        """Test the number of intermediate shapes"""
        self.assertEqual(shape_geodesic(self.start, self.end, 0), [])
        self.assertRaises(InvalidArgumentError, shape_geodesic, self.start,
                          self.end, -1)

    def test_mean(self):
        """Test the mean of standardized shapes"""
        mean = shape_mean([self.start, self.start])
        self.assertMatrixAlmostEqual(mean.points, self.start.points, 1e-10)
        mean = shape_mean([self.start, self.end])
        self.assertTrue(mean.standardized)
        middle = shape_geodesic(self.start, self.end, 1)[0]
        self.assertMatrixAlmostEqual(mean.points, middle.points, 1e-7)


if __name__ == '__main__':
    unittest.main()
