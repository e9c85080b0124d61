import io
import unittest

import numpy as np
import scipy.integrate
import scipy.stats

from stiefel.applications.halfdensity import pdf_to_halfdensity, \
    halfdensity_to_pdf, halfdensity_mean, load_pdf, trapezoid_weights
from stiefel.applications.karcher import KarcherConfig, karcher_iterate
from stiefel.manifold import StiefelPoint, InvalidArgumentError
from stiefel.manifold.io import ParseError
from stiefel.tests import StiefelTestCase

GRID = np.linspace(-5, 5, 201)
H = GRID[1] - GRID[0]


def gaussian(mean, scale=1.0):
    density = scipy.stats.norm.pdf(GRID, mean, scale)
    return density / scipy.integrate.trapezoid(density, dx=H)


class TestHalfDensity(StiefelTestCase):
    def test_point(self):
        """Test that half-densities are unit vectors"""
        point = pdf_to_halfdensity(gaussian(0), H)
        self.assertEqual(point.shape, (201, 1))
        self.assertFeasible(point)
        self.assertTrue(np.all(point.data >= 0))

    def test_round_trip(self):
        """Test that a density of unit mass is recovered exactly"""
        for density in [gaussian(0.5, 0.8), gaussian(-4.8, 0.5),
                        np.full(GRID.size, 0.1)]:
            self.assertAlmostEqual(scipy.integrate.trapezoid(density, dx=H),
                                   1, places=14)
            point = pdf_to_halfdensity(density, H)
            self.assertAlmostEqual(np.linalg.norm(point.data), 1, places=14)
            back = halfdensity_to_pdf(point, H)
            self.assertMatrixAlmostEqual(back, density,
                                         1e-13 * np.max(density))

    def test_weights(self):
        """Test that the squared norm is the trapezoid integral"""
        weights = trapezoid_weights(GRID.size, H)
        self.assertAlmostEqual(weights[0], H / 2, places=15)
        self.assertAlmostEqual(weights[-1], H / 2, places=15)
        self.assertAlmostEqual(np.sum(weights), GRID[-1] - GRID[0],
                               places=12)
        density = 3 * gaussian(1)
        with self.assertLogs('Applications', 'WARNING'):
            point = pdf_to_halfdensity(density, H)
        self.assertMatrixAlmostEqual(halfdensity_to_pdf(point, H),
                                     density / 3, 1e-13)

    def test_invalid(self):
        """Test rejection of invalid densities"""
        density = gaussian(0)
        density[10] = -1e-3
        self.assertRaises(InvalidArgumentError, pdf_to_halfdensity, density,
                          H)
        self.assertRaises(InvalidArgumentError, pdf_to_halfdensity,
                          np.zeros(201), H)
        self.assertRaises(InvalidArgumentError, pdf_to_halfdensity,
                          gaussian(0), 0)
        self.assertRaises(InvalidArgumentError, pdf_to_halfdensity,
                          np.ones(1), H)

    def test_rescaling(self):
        """Test the warning on densities of the wrong mass"""
        with self.assertLogs('Applications', 'WARNING'):
            point = pdf_to_halfdensity(2 * gaussian(0), H)
        self.assertMatrixAlmostEqual(point, pdf_to_halfdensity(gaussian(0), H),
                                     1e-14)

    def test_clamping(self):
        """Test that negative entries are clamped"""
        point = StiefelPoint(np.array([[0.6], [-0.8]]))
        with self.assertLogs('Applications', 'WARNING'):
            density, clamped = halfdensity_to_pdf(point, 0.5,
                                                  return_clamped=True)
        self.assertMatrixAlmostEqual(density, np.array([1.44, 0]), 1e-15)
        self.assertAlmostEqual(clamped, 0.64)
        self.assertRaises(InvalidArgumentError, halfdensity_to_pdf,
                          StiefelPoint(np.eye(3, 2)), 0.5)


class TestHalfDensityMean(StiefelTestCase):
    def test_three_densities(self):
        """Test the mean of three Gaussian densities"""
        densities = [gaussian(-1), gaussian(0, 1.5), gaussian(1.5, 0.7)]
        points = [pdf_to_halfdensity(g, H) for g in densities]
        result = karcher_iterate(points, KarcherConfig(tol=1e-10))
        self.assertTrue(result.converged)
        self.assertLessEqual(result.gradient_norm, 1e-8)
        self.assertFeasible(result.mean)

        mean = halfdensity_mean(densities, H)
        self.assertTrue(np.all(mean >= 0))
        self.assertAlmostEqual(scipy.integrate.trapezoid(mean, dx=H), 1,
                               places=10)
        # The mean lies between the extreme densities
        center = scipy.integrate.trapezoid(GRID * mean, dx=H)
        self.assertGreater(center, -1)
        self.assertLess(center, 1.5)


class TestLoadPdf(StiefelTestCase):
    def test_load(self):
        """Test reading a density file"""
        grid, values, h = load_pdf(io.StringIO('0,1\n0.5,2\n1,1\n'))
        self.assertMatrixAlmostEqual(grid, np.array([0, 0.5, 1]), 0)
        self.assertMatrixAlmostEqual(values, np.array([1, 2, 1]), 0)
        self.assertAlmostEqual(h, 0.5)

    def test_non_uniform(self):
        """Test rejection of non-uniform and short grids"""
        self.assertRaises(ParseError, load_pdf,
                          io.StringIO('0,1\n0.5,2\n1.2,1\n'))
        self.assertRaises(ParseError, load_pdf,
                          io.StringIO('1,1\n0.5,2\n0,1\n'))
        self.assertRaises(ParseError, load_pdf, io.StringIO('0,1\n'))


if __name__ == '__main__':
    unittest.main()
