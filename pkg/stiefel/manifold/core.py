"""
Manifold primitives: vectorization helpers, projections, the canonical
metric, tangent coordinates and random generation.
"""
import logging

import numpy as np
import scipy.linalg

from stiefel.manifold import InvalidArgumentError, StiefelPoint, \
    TangentVector, TangentCoordinates, TANGENCY_TOLERANCE, tangency_residual

logger = logging.getLogger('Manifold')

INJECTIVITY_RADIUS_BOUND = 2 * np.sqrt(5) / 5 * np.pi
"""Lower bound on the injectivity radius of St(n, p), canonical metric"""


def vec(matrix):
    """Stack the columns of a matrix into a single vector"""
    return np.reshape(matrix, -1, order='F')


def unvec(vector, rows, cols):
    """Inverse of :func:`vec`"""
    return np.reshape(vector, (rows, cols), order='F')


def sym(matrix):
    return (matrix + matrix.T) / 2


def skew(matrix):
    return (matrix - matrix.T) / 2


def skew_dimension(p):
    """Dimension of the space of p-by-p skew-symmetric matrices"""
    return p * (p - 1) // 2


def manifold_dimension(n, p):
    """Dimension ``np - p(p+1)/2`` of St(n, p)"""
    return n * p - p * (p + 1) // 2


def skew_indices(p):
    """Return (rows, cols) of the strictly upper triangle of a p-by-p matrix

    Entries are ordered column by column, i.e. ``(i, j)`` with ``i < j`` for
    ``j = 1..p-1`` in turn. This is the ordering of the columns of the skew
    basis used by :mod:`stiefel.frechet`.
    """
    rows = [i for j in range(p) for i in range(j)]
    cols = [j for j in range(p) for _ in range(j)]
    return np.array(rows, dtype=int), np.array(cols, dtype=int)


def pack_skew(omega):
    """Coefficients of a skew-symmetric matrix in the elementary skew basis"""
    rows, cols = skew_indices(omega.shape[0])
    return np.array(omega[rows, cols], dtype=float)


def unpack_skew(coefficients, p):
    """Inverse of :func:`pack_skew`"""
    rows, cols = skew_indices(p)
    upper = np.zeros((p, p))
    upper[rows, cols] = coefficients
    return upper - upper.T


def _check_shape(point, matrix):
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != point.shape:
        raise InvalidArgumentError('Dimension mismatch: matrix of shape {} '
                                   'for a point of shape {}'
                                   .format(matrix.shape, point.shape))
    return matrix


def _check_base(point, tangent):
    if not point.same_as(tangent.base):
        raise InvalidArgumentError('Tangent vector is not based at the given '
                                   'point')


def project_tangent(point, matrix):
    """Orthogonal projection onto the tangent space at ``point``

    :param StiefelPoint point: base point X
    :param numpy.ndarray matrix: ambient n-by-p matrix V
    :return: ``X skew(X^T V) + (I - X X^T) V``
    :rtype: TangentVector
    """
    matrix = _check_shape(point, matrix)
    x = point.data
    xtv = x.T @ matrix
    result = x @ skew(xtv) + matrix - x @ xtv
    return TangentVector(point, result, check=False)


def project_normal(point, matrix):
    """Orthogonal projection onto the normal space, ``X sym(X^T V)``

    :param StiefelPoint point: base point X
    :param numpy.ndarray matrix: ambient n-by-p matrix V
    :rtype: numpy.ndarray
    """
    matrix = _check_shape(point, matrix)
    return point.data @ sym(point.data.T @ matrix)


def canonical_inner(point, xi, zeta):
    """Canonical metric ``tr(xi^T (I - X X^T / 2) zeta)``

    :param StiefelPoint point: base point X
    :param TangentVector xi: first tangent vector at X
    :param TangentVector zeta: second tangent vector at X
    :rtype: float
    """
    _check_base(point, xi)
    _check_base(point, zeta)
    return _canonical_inner(point.data, xi.ambient, zeta.ambient)


def _canonical_inner(x, a, b):
    return float(np.sum(a * b) - np.sum((x.T @ a) * (x.T @ b)) / 2)


def canonical_norm(point, xi):
    """Length of a tangent vector under the canonical metric"""
    return np.sqrt(max(canonical_inner(point, xi, xi), 0.0))


def canonical_speed(x, velocity):
    """Canonical norm of a raw n-by-p matrix at a raw base matrix

    No tangency is checked; used for junction data during multiple shooting,
    where tangency holds only in the limit.
    """
    return np.sqrt(max(_canonical_inner(x, velocity, velocity), 0.0))


def embedded_norm(xi):
    """Frobenius norm of a tangent vector (Euclidean metric)"""
    return xi.frobenius_norm()


def orthonormal_complement(point):
    """Orthonormal basis of the orthogonal complement of span(X)

    The trailing ``n - p`` columns of the orthogonal factor of a full QR
    decomposition of X. For ``p = n`` the result has no columns.

    :param StiefelPoint point: point X
    :rtype: numpy.ndarray
    """
    n, p = point.shape
    if p == n:
        return np.zeros((n, 0))
    q, _ = scipy.linalg.qr(point.data)
    return q[:, p:]


def decompose_tangent(xi, complement=None):
    """Split ``xi = X Omega + X_perp K`` into canonical coordinates

    :param TangentVector xi: tangent vector
    :param numpy.ndarray|None complement: orthonormal complement to use;
        computed by :func:`orthonormal_complement` if omitted
    :raise InvalidArgumentError: if ``xi`` is not tangent at its base
    :rtype: TangentCoordinates
    """
    point = xi.base
    residual = tangency_residual(point.data, xi.ambient)
    if residual > TANGENCY_TOLERANCE * max(1.0, xi.frobenius_norm()):
        raise InvalidArgumentError('Cannot decompose a non-tangent matrix',
                                   residual)
    if complement is None:
        complement = orthonormal_complement(point)
    elif complement.shape != (point.n, point.n - point.p):
        raise InvalidArgumentError('Complement of shape {} does not match a '
                                   'point of shape {}'
                                   .format(complement.shape, point.shape))
    omega = skew(point.data.T @ xi.ambient)
    k = complement.T @ xi.ambient
    return TangentCoordinates(point, omega, k, complement)


def assemble_tangent(coords):
    """Inverse of :func:`decompose_tangent`

    :param TangentCoordinates coords: canonical coordinates
    :rtype: TangentVector
    """
    ambient = coords.base.data @ coords.omega + coords.complement @ coords.k
    return TangentVector(coords.base, ambient, check=False)


def polar_projection(matrix):
    """Closest point of St(n, p) in the Frobenius norm

    The orthonormal factor of the polar decomposition ``M = U H``.

    :param numpy.ndarray matrix: n-by-p matrix of full column rank
    :rtype: StiefelPoint
    """
    u, _ = scipy.linalg.polar(np.asarray(matrix, dtype=float))
    return StiefelPoint(u)


def random_point(n, p, seed=None):
    """Random point of St(n, p)

    The orthonormal factor of a Gaussian matrix, with the signs fixed so that
    the triangular factor has a nonnegative diagonal.

    :param int n: number of rows
    :param int p: number of columns
    :param int|None seed: seed of the generator
    :rtype: StiefelPoint
    """
    if not 1 <= p <= n:
        raise InvalidArgumentError('Invalid point dimensions {}x{}: need '
                                   '1 <= p <= n'.format(n, p))
    rng = np.random.default_rng(seed)
    q, r = scipy.linalg.qr(rng.standard_normal((n, p)), mode='economic')
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1
    return StiefelPoint(q * signs)


def random_tangent(point, norm=1.0, seed=None):
    """Random tangent vector with a prescribed canonical norm

    :param StiefelPoint point: base point
    :param float norm: target canonical norm (nonnegative)
    :param int|None seed: seed of the generator
    :rtype: TangentVector
    """
    if norm < 0:
        raise InvalidArgumentError('Tangent norm must be nonnegative, got {}'
                                   .format(norm))
    n, p = point.shape
    rng = np.random.default_rng(seed)
    omega = skew(rng.standard_normal((p, p)))
    k = rng.standard_normal((n - p, p))
    length = np.sqrt(np.sum(omega ** 2) / 2 + np.sum(k ** 2))
    if norm == 0 or length == 0:
        return TangentVector.zero(point)
    scale = norm / length
    coords = TangentCoordinates(point, scale * omega, scale * k,
                                orthonormal_complement(point))
    return assemble_tangent(coords)


def injectivity_radius_bound():
    """Lower bound ``2 sqrt(5) / 5 * pi`` on the injectivity radius"""
    return INJECTIVITY_RADIUS_BOUND
