"""
Planar shapes as points of the affine pre-shape space, a submanifold of
St(n, 2) of centered point sets with identity covariance.
"""
import logging

import numpy as np
import scipy.linalg

from stiefel.applications.karcher import KarcherConfig, karcher_mean, \
    logarithm
from stiefel.manifold import InvalidArgumentError, StiefelPoint
from stiefel.manifold.geodesic import stiefel_exp
from stiefel.manifold.io import read_table, FloatField

logger = logging.getLogger('Applications')

CENTROID_TOLERANCE = 1e-12
COLLINEARITY_TOLERANCE = 1e-10


class PointSet2D:
    """
    n points in the plane, one per row.
    """
    __slots__ = ['points', 'standardized']

    def __init__(self, points, standardized=False):
        """Constructor

        :param numpy.ndarray points: n-by-2 matrix
        :param bool standardized: whether the set is centered with identity
            covariance (checked)
        """
        points = np.array(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise InvalidArgumentError('Point sets are n-by-2 matrices, got '
                                       'shape {}'.format(points.shape))
        points.flags.writeable = False
        self.points = points
        self.standardized = standardized
        if standardized:
            centroid = np.linalg.norm(points.mean(axis=0))
            if centroid > CENTROID_TOLERANCE * max(1.0, points.shape[0]):
                raise InvalidArgumentError('Standardized shape is not '
                                           'centered', centroid)
            StiefelPoint(points, tol=1e-10)

    @property
    def n(self):
        return self.points.shape[0]

    def as_point(self):
        """The shape as a point of St(n, 2)

        :raise InvalidArgumentError: if the set is not standardized
        """
        if not self.standardized:
            raise InvalidArgumentError('Only standardized shapes are points '
                                       'of the pre-shape space')
        return StiefelPoint(self.points, tol=1e-10)

    def __repr__(self):
        return 'PointSet2D(n={}, standardized={})'.format(self.n,
                                                          self.standardized)


def affine_standardize(shape):
    """Center a point set and whiten its covariance

    Returns ``X0 = (X - 1 c^T) S^(-1/2)`` with ``S = (X - 1 c^T)^T
    (X - 1 c^T)``, so that ``X0`` has zero centroid and orthonormal columns.

    :param PointSet2D shape: point set
    :raise InvalidArgumentError: if the points are collinear
    :rtype: PointSet2D
    """
    centered = shape.points - shape.points.mean(axis=0)
    sigma = scipy.linalg.svdvals(centered)
    if sigma.size < 2 or sigma[-1] <= COLLINEARITY_TOLERANCE * \
            max(1.0, sigma[0]):
        raise InvalidArgumentError('Cannot standardize collinear points')
    values, vectors = scipy.linalg.eigh(centered.T @ centered)
    whitening = (vectors / np.sqrt(values)) @ vectors.T
    result = centered @ whitening
    # Removes rounding noise from the centroid
    result -= result.mean(axis=0)
    return PointSet2D(result, standardized=True)


def _as_point(shape):
    return shape.as_point() if isinstance(shape, PointSet2D) else shape


def shape_geodesic(start, end, k, config=None):
    """Equidistant shapes on the geodesic between two standardized shapes

    :param PointSet2D start: first shape
    :param PointSet2D end: second shape
    :param int k: number of intermediate shapes
    :param KarcherConfig|None config: logarithm settings (set ``lfms`` to
        allow the LFMS fallback)
    :return: shapes at ``t = i / (k + 1)``, ``i = 1..k``
    :rtype: list[PointSet2D]
    """
    if config is None:
        config = KarcherConfig()
    if k < 0:
        raise InvalidArgumentError('Number of shapes must be nonnegative')
    x0 = _as_point(start)
    x1 = _as_point(end)
    xi = logarithm(x0, x1, config, 'start, end')
    result = []
    for i in range(1, k + 1):
        point = stiefel_exp(x0, xi, i / (k + 1)).point
        result.append(PointSet2D(point.data, standardized=True))
    return result


def shape_mean(shapes, config=None):
    """Karcher mean of standardized shapes

    :param list[PointSet2D] shapes: standardized shapes
    :param KarcherConfig|None config: settings
    :rtype: PointSet2D
    """
    mean = karcher_mean([_as_point(s) for s in shapes], config)
    return PointSet2D(mean.data - mean.data.mean(axis=0), standardized=True)


def load_point_set(source):
    """Read a point set from a CSV file with two columns

    :param source: path or open text file
    :rtype: PointSet2D
    """
    return PointSet2D(read_table(source, [FloatField(), FloatField()]))
