from unittest import TestCase

import numpy as np

from stiefel.manifold import StiefelPoint, feasibility_residual, \
    tangency_residual


class StiefelTestCase(TestCase):
    """
    Utility class for writing tests of manifold computations
    """

    def assertMatrixAlmostEqual(self, first, second, tol=1e-12, msg=None):
        """Assert that two arrays agree in the Frobenius norm

        :param first: first array (or an object with ``data``/``ambient``)
        :param second: second array
        :param float tol: largest accepted norm of the difference
        """
        first = np.asarray(getattr(first, 'data', getattr(
            first, 'ambient', first)), dtype=float)
        second = np.asarray(getattr(second, 'data', getattr(
            second, 'ambient', second)), dtype=float)
        self.assertEqual(first.shape, second.shape, 'Shapes differ')
        difference = np.linalg.norm(first - second)
        if difference > tol:
            self.fail(self._formatMessage(
                msg, 'Matrices differ by {:.3e} > {:.3e}'.format(difference,
                                                                 tol)))

    def assertFeasible(self, point, tol=1e-12):
        """Assert that a matrix has orthonormal columns"""
        data = point.data if isinstance(point, StiefelPoint) else point
        residual = feasibility_residual(np.asarray(data))
        self.assertLessEqual(residual, tol, 'Point is not feasible')

    def assertTangent(self, xi, base=None, tol=1e-10):
        """Assert that a tangent vector satisfies X^T V + V^T X = 0"""
        if base is None:
            base = xi.base
        ambient = getattr(xi, 'ambient', xi)
        residual = tangency_residual(np.asarray(getattr(base, 'data', base)),
                                     np.asarray(ambient))
        self.assertLessEqual(residual, tol, 'Vector is not tangent')
