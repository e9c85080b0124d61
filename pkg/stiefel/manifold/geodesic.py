"""
Closed-form geodesics under the canonical metric.
"""
import numpy as np
import scipy.linalg

from stiefel.frechet import StructuredA
from stiefel.manifold import GeodesicSample, InvalidArgumentError, \
    StiefelPoint, TangentVector
from stiefel.manifold.core import decompose_tangent


def propagate(basis, a, p, t=1.0):
    """Evaluate ``Z1 = Q exp(tA) [I; 0]`` and ``Z2 = Q exp(tA) A [I; 0]``

    :param numpy.ndarray basis: n-by-n matrix Q
    :param numpy.ndarray a: n-by-n generator A (any square matrix)
    :param int p: number of columns of the points
    :param float t: curve parameter
    :return: raw matrices ``(Z1, Z2)``
    """
    e = scipy.linalg.expm(t * a)
    return basis @ e[:, :p], basis @ (e @ a[:, :p])


def stiefel_exp(point, xi, t=1.0, complement=None):
    """Riemannian exponential ``Exp_X(t xi)`` and the geodesic velocity

    :param StiefelPoint point: base point
    :param TangentVector xi: initial velocity
    :param float t: curve parameter
    :param numpy.ndarray|None complement: orthonormal complement of the base
        point to use (the result does not depend on the choice)
    :raise InvalidArgumentError: if ``xi`` is not tangent at ``point``
    :rtype: GeodesicSample
    """
    if not point.same_as(xi.base):
        raise InvalidArgumentError('Tangent vector is not based at the given '
                                   'point')
    coords = decompose_tangent(xi, complement)
    return exp_from_coordinates(coords, t)


def exp_from_coordinates(coords, t=1.0):
    """Same as :func:`stiefel_exp`, for an already decomposed tangent

    :param stiefel.manifold.TangentCoordinates coords: coordinates of xi
    :param float t: curve parameter
    :rtype: GeodesicSample
    """
    point = coords.base
    a = StructuredA.from_coordinates(coords).matrix
    basis = np.hstack([point.data, coords.complement])
    z1, z2 = propagate(basis, a, point.p, t)
    end = StiefelPoint(z1)
    return GeodesicSample(end, TangentVector(end, z2), t)


def geodesic_ode_residual(samples, h=None):
    """Residual of the geodesic equation at the middle of three samples

    Evaluates ``||Y'' + Y' Y'^T Y + Y ((Y^T Y')^2 + Y'^T Y')||_F`` with the
    second derivative replaced by a central difference.

    :param samples: samples at ``t - h``, ``t`` and ``t + h``
    :type samples: list[GeodesicSample]
    :param float|None h: step; taken from the sample parameters if omitted
    :rtype: float
    """
    before, middle, after = samples
    if h is None:
        h = middle.t - before.t
        if not np.isclose(after.t - middle.t, h, rtol=1e-9, atol=0.0):
            raise InvalidArgumentError('Samples are not equally spaced')
    if h <= 0:
        raise InvalidArgumentError('Step must be positive, got {}'.format(h))
    y = middle.point.data
    dy = middle.velocity.ambient
    ddy = (after.point.data - 2 * y + before.point.data) / h ** 2
    ytdy = y.T @ dy
    lhs = ddy + dy @ (dy.T @ y) + y @ (ytdy @ ytdy + dy.T @ dy)
    return np.linalg.norm(lhs)
