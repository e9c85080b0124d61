"""
Multiple shooting over a broken geodesic.

The unknown collects m junction points ``Sigma1[k]`` and velocities
``Sigma2[k]`` in ambient coordinates. Every segment is propagated over unit
time from its junction; the nonlinear system asks consecutive segments to
match and the first and last junctions to hit the endpoints X and Y.
"""
import logging

import numpy as np
import scipy.linalg

from stiefel.frechet.jacobian import SKEW_TOLERANCE, jacobian_exp_apply, \
    jacobian_exp_block
from stiefel.frechet.kronecker import BlockVecMap, ShuffleMap, \
    kron_identity_left
from stiefel.manifold import InvalidArgumentError, NumericError, \
    default_feasibility_tolerance, feasibility_residual
from stiefel.manifold.core import vec, unvec, canonical_speed, \
    project_tangent, decompose_tangent
from stiefel.manifold.geodesic import exp_from_coordinates, propagate
from stiefel.shooting import REASON_CONVERGED, REASON_MAX_ITERATIONS, \
    REASON_SINGULAR, _positive

logger = logging.getLogger('MultipleShooting')

SVD_TOLERANCE = 1e-8
"""Smallest singular value of a junction point accepted by the Jacobian"""

CONDENSED_TOLERANCE = 1e-14
"""Smallest accepted ratio of the singular values of the condensed matrix"""


class MultipleShootingConfig:
    """
    Settings of multiple shooting

    :ivar float tol: stopping tolerance on ``||F(Sigma)||_2``
    :ivar int max_iter: maximum number of Newton iterations
    :ivar float feasibility_tol: largest junction infeasibility accepted by
        :func:`residual_F`
    """

    def __init__(self, tol=1e-12, max_iter=10, feasibility_tol=1e-6):
        self.tol = _positive('tol', float(tol))
        self.max_iter = int(max_iter)
        if self.max_iter < 1:
            raise InvalidArgumentError('max_iter must be at least 1, got {}'
                                       .format(max_iter))
        self.feasibility_tol = _positive('feasibility_tol',
                                         float(feasibility_tol))

    @classmethod
    def from_settings(cls, settings, section='multiple_shooting'):
        return cls(**settings.typed_section(
            section, floats=('tol', 'feasibility_tol'), ints=('max_iter',)))

    def as_dict(self):
        return {'tol': self.tol, 'max_iter': self.max_iter,
                'feasibility_tol': self.feasibility_tol}


class SingularCondensedError(NumericError):
    """
    Raised when the condensed matrix of multiple shooting is singular, which
    happens near the cut locus or for a degenerate partition.
    """
    pass


class BrokenGeodesic:
    """
    Junction points and velocities of a piecewise geodesic.

    The arrays are raw n-by-p matrices: during Newton the points are only
    approximately orthonormal and the velocities only approximately tangent.
    """
    __slots__ = ['sigma1', 'sigma2']

    def __init__(self, sigma1, sigma2):
        """Constructor

        :param list sigma1: m junction points (matrices or StiefelPoints)
        :param list sigma2: m junction velocities (matrices or
            TangentVectors)
        """
        sigma1 = [_raw(s, 'data') for s in sigma1]
        sigma2 = [_raw(s, 'ambient') for s in sigma2]
        if len(sigma1) < 2 or len(sigma1) != len(sigma2):
            raise InvalidArgumentError('Need m >= 2 junction points and as '
                                       'many velocities, got {} and {}'
                                       .format(len(sigma1), len(sigma2)))
        shape = sigma1[0].shape
        if any(s.shape != shape for s in sigma1 + sigma2):
            raise InvalidArgumentError('Junction data must share one shape')
        self.sigma1 = sigma1
        self.sigma2 = sigma2

    @property
    def m(self):
        return len(self.sigma1)

    @property
    def shape(self):
        return self.sigma1[0].shape

    def to_vector(self):
        return np.concatenate([np.concatenate([vec(a), vec(b)])
                               for a, b in zip(self.sigma1, self.sigma2)])

    @classmethod
    def from_vector(cls, vector, m, n, p):
        blocks = np.reshape(vector, (m, 2, n * p))
        return cls([unvec(b[0], n, p) for b in blocks],
                   [unvec(b[1], n, p) for b in blocks])

    @classmethod
    def sample_geodesic(cls, point, xi, m):
        """Sample the geodesic ``Exp_X(t xi)`` at ``t = k / (m - 1)``

        Velocities are scaled by ``1 / (m - 1)``, so each segment is a unit
        time geodesic.

        :param StiefelPoint point: X
        :param stiefel.manifold.TangentVector xi: initial velocity
        :param int m: number of junctions
        :rtype: BrokenGeodesic
        """
        coords = decompose_tangent(xi)
        sigma1 = []
        sigma2 = []
        for k in range(m):
            sample = exp_from_coordinates(coords, k / (m - 1))
            sigma1.append(sample.point.data)
            sigma2.append(sample.velocity.ambient / (m - 1))
        return cls(sigma1, sigma2)

    def length(self):
        """Sum of the canonical speeds of the m - 1 segments"""
        return float(sum(canonical_speed(a, b) for a, b in
                         zip(self.sigma1[:-1], self.sigma2[:-1])))

    def drift(self):
        """Largest feasibility residual over the junction points"""
        return max(feasibility_residual(s) for s in self.sigma1)

    def __repr__(self):
        n, p = self.shape
        return 'BrokenGeodesic(m={}, n={}, p={})'.format(self.m, n, p)


def _raw(value, attribute):
    return np.array(getattr(value, attribute, value), dtype=float)


def _svd_factors(sigma1):
    """Full SVD of a junction point with a fixed sign convention

    The entry of largest magnitude of every left singular vector is made
    positive.
    """
    n, p = sigma1.shape
    u, s, vt = scipy.linalg.svd(sigma1, full_matrices=True)
    rows = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[rows, np.arange(n)])
    signs[signs == 0] = 1
    u = u * signs
    vt = signs[:p, np.newaxis] * vt
    return u[:, :p], u[:, p:], s, vt.T


def _segment_generator(sigma1, sigma2, complement):
    n, p = sigma1.shape
    a = np.zeros((n, n))
    k = complement.T @ sigma2
    a[:p, :p] = sigma1.T @ sigma2
    a[p:, :p] = k
    a[:p, p:] = -k.T
    return a


def propagate_segment(sigma1, sigma2):
    """Endpoint and end velocity of a unit time segment

    ``Z = Q [exp(A)[I; 0], exp(A) A [I; 0]]`` with ``Q = [Sigma1, U_perp]``,
    U_perp taken from the SVD of Sigma1.

    :param numpy.ndarray sigma1: junction point
    :param numpy.ndarray sigma2: junction velocity
    :return: ``(Z1, Z2)``
    """
    p = sigma1.shape[1]
    _, complement, _, _ = _svd_factors(sigma1)
    basis = np.hstack([sigma1, complement])
    return propagate(basis, _segment_generator(sigma1, sigma2, complement), p)


def _check_endpoints(broken, start, end):
    if start.shape != broken.shape or end.shape != broken.shape:
        raise InvalidArgumentError('Endpoints of shape {} and {} do not match '
                                   'junctions of shape {}'
                                   .format(start.shape, end.shape,
                                           broken.shape))


def _residual(broken, start, end):
    blocks = []
    for k in range(broken.m - 1):
        z1, z2 = propagate_segment(broken.sigma1[k], broken.sigma2[k])
        blocks.append(vec(z1 - broken.sigma1[k + 1]))
        blocks.append(vec(z2 - broken.sigma2[k + 1]))
    blocks.append(vec(broken.sigma1[0] - start.data))
    blocks.append(vec(broken.sigma1[-1] - end.data))
    return np.concatenate(blocks)


def residual_F(broken, start, end, tol=1e-6):
    """The nonlinear system of multiple shooting

    Blocks ``[Z1 - Sigma1[k+1]; Z2 - Sigma2[k+1]]`` for each segment followed
    by ``Sigma1[1] - X`` and ``Sigma1[m] - Y``.

    :param BrokenGeodesic broken: current iterate
    :param StiefelPoint start: X
    :param StiefelPoint end: Y
    :param float tol: largest accepted junction infeasibility
    :raise InvalidArgumentError: if a junction point is infeasible
    :rtype: numpy.ndarray
    """
    _check_endpoints(broken, start, end)
    for k, sigma1 in enumerate(broken.sigma1):
        residual = feasibility_residual(sigma1)
        if residual > tol:
            raise InvalidArgumentError('Junction point {} is infeasible'
                                       .format(k + 1), residual)
    return _residual(broken, start, end)


def segment_mismatches(broken):
    """Norms of ``Z(1) - Sigma[k+1]`` for every segment"""
    result = []
    for k in range(broken.m - 1):
        z1, z2 = propagate_segment(broken.sigma1[k], broken.sigma2[k])
        result.append(float(np.sqrt(
            np.sum((z1 - broken.sigma1[k + 1]) ** 2) +
            np.sum((z2 - broken.sigma2[k + 1]) ** 2))))
    return result


class SegmentJacobian:
    """
    The four np-by-np blocks of the Jacobian of a segment map
    ``(Sigma1, Sigma2) -> (Z1, Z2)``.
    """
    __slots__ = ['j11', 'j12', 'j21', 'j22']

    def __init__(self, j11, j12, j21, j22):
        """
        ``j11`` is dZ1/dSigma1, ``j12`` dZ1/dSigma2, ``j21`` dZ2/dSigma1 and
        ``j22`` dZ2/dSigma2.
        """
        self.j11 = j11
        self.j12 = j12
        self.j21 = j21
        self.j22 = j22

    @property
    def matrix(self):
        """The 2np-by-2np block matrix G"""
        return np.block([[self.j11, self.j12], [self.j21, self.j22]])


def _exp_derivative(a):
    """Function applying the Jacobian of exp at a segment generator

    The generator is skew exactly when Sigma1^T Sigma2 is, which holds for
    tangent junction velocities. The structured eigenbasis product is used
    then and the Van Loan block exponential of size 2n^2 otherwise.
    """
    residual = np.linalg.norm(a + a.T)
    if residual <= SKEW_TOLERANCE * max(1.0, np.linalg.norm(a)):
        return lambda directions: jacobian_exp_apply(a, directions)
    logger.debug('Segment generator off skew by {:.3e}, using the block '
                 'exponential'.format(residual))
    return jacobian_exp_block(a).matrix.__matmul__


def segment_jacobian(sigma1, sigma2):
    """Jacobian of one segment map in SVD form

    :param numpy.ndarray sigma1: junction point
    :param numpy.ndarray sigma2: junction velocity
    :raise NumericError: if the singular values of Sigma1 are nearly zero
    :rtype: SegmentJacobian
    """
    sigma1 = np.asarray(sigma1, dtype=float)
    sigma2 = np.asarray(sigma2, dtype=float)
    n, p = sigma1.shape
    q = n - p
    u_p, complement, s, v_p = _svd_factors(sigma1)
    if s.min() < SVD_TOLERANCE:
        raise NumericError('Junction point is nearly rank deficient, the SVD '
                           'of its complement is too sensitive',
                           condition=s.max() / s.min() if s.min() > 0
                           else np.inf)
    basis = np.hstack([sigma1, complement])
    a = _segment_generator(sigma1, sigma2, complement)
    e = scipy.linalg.expm(a)
    ea = e @ a
    derivative = _exp_derivative(a)
    blocks = BlockVecMap(n, p)
    identity = np.eye(n)
    shuffle = ShuffleMap(q, p)

    # Derivative of vec(Q) with respect to vec(Sigma1)
    pseudo_inverse = (u_p / s) @ v_p.T
    d_complement = -np.kron(complement.T, pseudo_inverse)[
        :, ShuffleMap(n, p).inverse]
    d_basis = np.vstack([np.eye(n * p), d_complement])

    top = np.eye(n)[:p]
    bottom = np.eye(n)[p:]
    d_k = np.kron(sigma2.T, bottom)
    d_a1 = blocks.apply(np.vstack([
        np.kron(sigma2.T, top),
        d_k,
        -shuffle.apply(d_k),
        np.zeros((q * q, n * n))]))
    d_a1 = d_a1 @ ShuffleMap(n, n).apply(d_basis)
    exp_a1 = derivative(d_a1)

    j11 = np.kron(e[:, :p].T, identity) @ d_basis + \
        kron_identity_left(basis, exp_a1[:n * p], p)
    j21 = (np.kron(ea[:, :p].T, identity) @ d_basis +
           np.kron(a[:, :p].T, basis) @ exp_a1 +
           kron_identity_left(basis @ e, d_a1[:n * p], p))

    d_k = np.kron(np.eye(p), complement.T)
    d_a2 = blocks.apply(np.vstack([
        np.kron(np.eye(p), sigma1.T),
        d_k,
        -shuffle.apply(d_k),
        np.zeros((q * q, n * p))]))
    exp_a2 = derivative(d_a2)
    j12 = kron_identity_left(basis, exp_a2[:n * p], p)
    j22 = kron_identity_left(
        basis, (np.kron(a.T, identity) @ exp_a2 +
                np.kron(identity, e) @ d_a2)[:n * p], p)
    return SegmentJacobian(j11, j12, j21, j22)


def condensed_solve(jacobians, f):
    """Solve the linearized multiple shooting system by condensing

    Eliminates all junctions but the first, solves one 2np-by-2np system
    for it and recovers the rest by forward recursion.

    :param list jacobians: m - 1 segment Jacobians (:class:`SegmentJacobian`
        or 2np-by-2np matrices)
    :param numpy.ndarray f: residual vector of length 2mnp
    :raise SingularCondensedError: if the condensed matrix is singular
    :return: Newton correction of length 2mnp
    :rtype: numpy.ndarray
    """
    g = [getattr(j, 'matrix', j) for j in jacobians]
    size = g[0].shape[0]
    m = len(g) + 1
    f = np.reshape(f, (m, size))
    half = size // 2

    product = np.eye(size)
    accumulated = np.zeros(size)
    for k in range(m - 1):
        product = g[k] @ product
        accumulated = g[k] @ accumulated + f[k]
    condensed = np.vstack([np.eye(half, size), product[:half]])
    rhs = f[m - 1].copy()
    rhs[half:] += accumulated[:half]

    sigma = scipy.linalg.svdvals(condensed)
    if sigma[-1] <= CONDENSED_TOLERANCE * sigma[0]:
        raise SingularCondensedError(
            'Condensed matrix is singular: the partition is degenerate or '
            'the endpoints are close to the cut locus',
            condition=sigma[0] / sigma[-1] if sigma[-1] > 0 else np.inf)
    delta = [scipy.linalg.solve(condensed, -rhs)]
    for k in range(m - 1):
        delta.append(f[k] + g[k] @ delta[k])
    return np.concatenate(delta)


def assemble_full_jacobian(jacobians):
    """Dense Jacobian of the multiple shooting system

    Block row k holds ``G[k]`` on the diagonal and ``-I`` to its right; the
    last block row holds the boundary selectors C and D.

    :param list jacobians: m - 1 segment Jacobians
    :rtype: numpy.ndarray
    """
    g = [getattr(j, 'matrix', j) for j in jacobians]
    size = g[0].shape[0]
    half = size // 2
    m = len(g) + 1
    result = np.zeros((m * size, m * size))
    for k in range(m - 1):
        result[k * size:(k + 1) * size, k * size:(k + 1) * size] = g[k]
        result[k * size:(k + 1) * size, (k + 1) * size:(k + 2) * size] = \
            -np.eye(size)
    last = (m - 1) * size
    result[last:last + half, :half] = np.eye(half)
    result[last + half:, last:last + half] = np.eye(half)
    return result


def dense_solve(jacobians, f):
    """Newton correction from a dense solve of the full system"""
    return scipy.linalg.solve(assemble_full_jacobian(jacobians), -f)


class MSReport:
    """
    Result of multiple shooting (possibly preceded by leapfrog)

    ``xi`` is the initial velocity of the whole geodesic, i.e. the first
    junction velocity scaled by ``m - 1``.
    """
    __slots__ = ['converged', 'f_history', 'length_history', 'broken', 'xi',
                 'distance', 'reason', 'path', 'sweeps', 'segment_mismatches',
                 'drift', 'trace']

    def __init__(self, converged, f_history, length_history, broken, xi,
                 distance, reason, path='multiple', sweeps=0,
                 segment_mismatches=None, drift=None, trace=None):
        self.converged = converged
        self.f_history = list(f_history)
        self.length_history = list(length_history)
        self.broken = broken
        self.xi = xi
        self.distance = distance
        self.reason = reason
        self.path = path
        self.sweeps = sweeps
        self.segment_mismatches = segment_mismatches or []
        self.drift = drift
        self.trace = trace

    @property
    def iterations(self):
        """Number of Newton steps taken"""
        return max(len(self.f_history) - 1, 0)

    @property
    def m(self):
        return self.broken.m if self.broken is not None else None

    def as_dict(self):
        return {
            'converged': self.converged,
            'iterations': self.iterations,
            'distance': self.distance,
            'F_history': [float(x) for x in self.f_history],
            'length_history': [float(x) for x in self.length_history],
            'reason': self.reason,
            'path': self.path,
            'm': self.m,
            'sweeps': self.sweeps,
            'segment_mismatches': self.segment_mismatches,
            'drift': self.drift,
        }

    def __repr__(self):
        return 'MSReport(converged={}, path={!r}, m={}, reason={!r})'.format(
            self.converged, self.path, self.m, self.reason)


def multiple_shoot(initial, start, end, config=None):
    """Newton's method on a broken geodesic from X to Y

    :param BrokenGeodesic initial: starting iterate, m >= 2
    :param StiefelPoint start: X
    :param StiefelPoint end: Y
    :param MultipleShootingConfig|None config: settings
    :rtype: MSReport
    """
    if config is None:
        config = MultipleShootingConfig()
    residual_F(initial, start, end, config.feasibility_tol)
    n, p = initial.shape
    m = initial.m
    broken = initial
    f_history = []
    length_history = []
    reason = REASON_MAX_ITERATIONS
    for iteration in range(config.max_iter + 1):
        f = _residual(broken, start, end)
        f_history.append(float(np.linalg.norm(f)))
        length_history.append(broken.length())
        logger.debug('Iteration {}: |F| = {:.3e}, L = {:.12g}'
                     .format(iteration, f_history[-1], length_history[-1]))
        if f_history[-1] <= config.tol:
            reason = REASON_CONVERGED
            break
        if iteration == config.max_iter:
            break
        try:
            jacobians = [segment_jacobian(broken.sigma1[k], broken.sigma2[k])
                         for k in range(m - 1)]
            delta = condensed_solve(jacobians, f)
        except NumericError as e:
            logger.warning('Multiple shooting stopped at iteration {}: {}'
                           .format(iteration, e))
            reason = REASON_SINGULAR
            break
        broken = BrokenGeodesic.from_vector(broken.to_vector() + delta,
                                            m, n, p)

    converged = reason == REASON_CONVERGED
    drift = float(broken.drift())
    if drift > default_feasibility_tolerance(p):
        logger.warning('Junction feasibility drift {:.3e}'.format(drift))
    xi = None
    distance = None
    if converged:
        xi = project_tangent(start, (m - 1) * broken.sigma2[0])
        distance = broken.length()
    else:
        logger.warning('Multiple shooting did not converge ({}), |F| = {:.3e}'
                       .format(reason, f_history[-1]))
    return MSReport(converged, f_history, length_history, broken, xi,
                    distance, reason, segment_mismatches=segment_mismatches(
                        broken), drift=drift)
