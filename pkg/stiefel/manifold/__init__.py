"""
Points, tangent vectors and geodesic samples of the compact Stiefel manifold
St(n, p), together with the errors raised throughout the library.

All arrays stored in these objects are copied and made read-only, so the
objects can be shared between threads freely.
"""
import numpy as np

FEASIBILITY_TOLERANCE = 1e-12
"""Base tolerance on ``||X^T X - I||_F``; scaled by ``sqrt(p)``"""

TANGENCY_TOLERANCE = 1e-10
"""Tolerance on ``||X^T V + V^T X||_F`` relative to ``max(1, ||V||_F)``"""


class ManifoldError(Exception):
    """Base class of the errors raised by the library"""
    pass


class InvalidArgumentError(ManifoldError):
    """
    Raised when an operation receives arguments violating its preconditions.

    Except the message, ``residual`` may hold the measured size of the
    violation (e.g. the tangency residual of a supposed tangent vector).
    """

    def __init__(self, message, residual=None):
        """Constructor

        :param str message: message to show
        :param float|None residual: measured violation, if any
        """
        super().__init__(message)
        self.message = message
        self.residual = residual

    def __str__(self):
        if self.residual is not None:
            return '{} (residual: {:.3e})'.format(self.message, self.residual)
        return self.message


class InfeasiblePointError(InvalidArgumentError):
    """Raised when a matrix does not have orthonormal columns"""

    def __init__(self, message, residual, tolerance):
        """Constructor

        :param str message: message to show
        :param float residual: ``||X^T X - I||_F``
        :param float tolerance: tolerance that was exceeded
        """
        super().__init__(message, residual)
        self.tolerance = tolerance

    def __str__(self):
        return '{} (residual {:.3e} > tolerance {:.3e})'.format(
            self.message, self.residual, self.tolerance)


class NumericError(ManifoldError):
    """
    Raised when a numerical kernel cannot produce a trustworthy result,
    e.g. a factorization of a nearly singular matrix.
    """

    def __init__(self, message, condition=None):
        """Constructor

        :param str message: message to show
        :param float|None condition: condition estimate of the offending
            matrix, if available
        """
        super().__init__(message)
        self.message = message
        self.condition = condition

    def __str__(self):
        if self.condition is not None:
            return '{} (condition estimate: {:.3e})'.format(self.message,
                                                            self.condition)
        return self.message


def _frozen(array):
    result = np.array(array, dtype=float)
    result.flags.writeable = False
    return result


def feasibility_residual(data):
    """Return ``||X^T X - I_p||_F`` for an n-by-p matrix

    :param numpy.ndarray data: matrix to check
    :rtype: float
    """
    return np.linalg.norm(data.T @ data - np.eye(data.shape[1]))


def tangency_residual(base, ambient):
    """Return ``||X^T V + V^T X||_F``

    :param numpy.ndarray base: base point as a matrix
    :param numpy.ndarray ambient: ambient matrix to check
    :rtype: float
    """
    m = base.T @ ambient
    return np.linalg.norm(m + m.T)


def default_feasibility_tolerance(p):
    return FEASIBILITY_TOLERANCE * np.sqrt(p)


class StiefelPoint:
    """
    An n-by-p real matrix with orthonormal columns.
    """
    __slots__ = ['data', 'n', 'p']

    def __init__(self, data, tol=None, check=True):
        """Constructor

        :param data: n-by-p matrix (anything accepted by ``numpy.array``)
        :param float|None tol: feasibility tolerance; defaults to
            ``1e-12 * sqrt(p)``
        :param bool check: whether to check feasibility at all
        :raise InvalidArgumentError: if the shape is not n-by-p with p <= n
        :raise InfeasiblePointError: if the columns are not orthonormal
        """
        data = _frozen(data)
        if data.ndim != 2:
            raise InvalidArgumentError('A point must be a 2-D matrix, got '
                                       'an array of dimension {}'
                                       .format(data.ndim))
        n, p = data.shape
        if p < 1 or p > n:
            raise InvalidArgumentError('Invalid point dimensions {}x{}: '
                                       'need 1 <= p <= n'.format(n, p))
        if check:
            if tol is None:
                tol = default_feasibility_tolerance(p)
            residual = feasibility_residual(data)
            if residual > tol:
                raise InfeasiblePointError('Columns are not orthonormal',
                                           residual, tol)
        self.data = data
        self.n = n
        self.p = p

    @property
    def shape(self):
        return self.data.shape

    def residual(self):
        """Return the feasibility residual ``||X^T X - I||_F``"""
        return feasibility_residual(self.data)

    def same_as(self, other):
        """Check if ``other`` is the same point (bit-for-bit)"""
        return self is other or (self.shape == other.shape and
                                 np.array_equal(self.data, other.data))

    def __repr__(self):
        return 'StiefelPoint(n={}, p={})'.format(self.n, self.p)


class TangentVector:
    """
    An ambient n-by-p matrix attached to a base point X, satisfying
    ``X^T V + V^T X = 0``.
    """
    __slots__ = ['base', 'ambient']

    def __init__(self, base, ambient, tol=None, check=True):
        """Constructor

        :param StiefelPoint base: base point
        :param ambient: n-by-p matrix
        :param float|None tol: tangency tolerance; defaults to
            ``1e-10 * max(1, ||V||_F)``
        :param bool check: whether to check tangency at all
        :raise InvalidArgumentError: on shape mismatch or if the matrix is not
            tangent at ``base``
        """
        ambient = _frozen(ambient)
        if ambient.shape != base.shape:
            raise InvalidArgumentError('Tangent vector of shape {} does not '
                                       'match base point of shape {}'
                                       .format(ambient.shape, base.shape))
        if check:
            if tol is None:
                tol = TANGENCY_TOLERANCE * max(1.0, np.linalg.norm(ambient))
            residual = tangency_residual(base.data, ambient)
            if residual > tol:
                raise InvalidArgumentError('Matrix is not tangent at the '
                                           'base point', residual)
        self.base = base
        self.ambient = ambient

    @classmethod
    def zero(cls, base):
        return cls(base, np.zeros(base.shape), check=False)

    def frobenius_norm(self):
        return np.linalg.norm(self.ambient)

    def scaled(self, factor):
        """Return a new tangent vector multiplied by ``factor``"""
        return TangentVector(self.base, factor * self.ambient, check=False)

    def __repr__(self):
        return 'TangentVector(n={}, p={}, norm={:.6g})'.format(
            self.base.n, self.base.p, self.frobenius_norm())


class TangentCoordinates:
    """
    Canonical coordinates of a tangent vector ``xi = X Omega + X_perp K``.

    ``omega`` is exactly skew-symmetric, ``k`` is (n-p)-by-p and
    ``complement`` is the orthonormal complement X_perp the coordinates refer
    to. ``packed`` collects the coefficients of Omega in the skew basis and
    ``vec(K)`` in a single vector of length ``np - p(p+1)/2``.
    """
    __slots__ = ['base', 'omega', 'k', 'complement']

    def __init__(self, base, omega, k, complement):
        omega = np.asarray(omega, dtype=float)
        self.base = base
        self.omega = _frozen((omega - omega.T) / 2)
        self.k = _frozen(np.reshape(k, (base.n - base.p, base.p)))
        self.complement = _frozen(complement)

    @property
    def packed(self):
        from stiefel.manifold.core import pack_skew, vec
        return np.concatenate([pack_skew(self.omega), vec(self.k)])

    @classmethod
    def from_packed(cls, base, complement, x):
        """Build coordinates from a packed vector

        :param StiefelPoint base: base point
        :param numpy.ndarray complement: orthonormal complement of ``base``
        :param numpy.ndarray x: packed coefficients
        :rtype: TangentCoordinates
        """
        from stiefel.manifold.core import unpack_skew, unvec, \
            skew_dimension
        n, p = base.shape
        x = np.asarray(x, dtype=float)
        s = skew_dimension(p)
        if x.shape != (s + (n - p) * p,):
            raise InvalidArgumentError('Packed vector has length {}, '
                                       'expected {}'
                                       .format(x.size, s + (n - p) * p))
        return cls(base, unpack_skew(x[:s], p), unvec(x[s:], n - p, p),
                   complement)

    def __repr__(self):
        return 'TangentCoordinates(n={}, p={})'.format(self.base.n,
                                                       self.base.p)


class GeodesicSample:
    """Point ``Z1(t)`` and velocity ``Z2(t)`` of a geodesic at parameter t"""
    __slots__ = ['point', 'velocity', 't']

    def __init__(self, point, velocity, t):
        """Constructor

        :param StiefelPoint point: point on the geodesic
        :param TangentVector velocity: velocity at ``point``
        :param float t: curve parameter
        """
        self.point = point
        self.velocity = velocity
        self.t = t

    def __repr__(self):
        return 'GeodesicSample(t={})'.format(self.t)
