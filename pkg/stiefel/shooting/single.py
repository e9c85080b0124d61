"""
Single shooting: Newton's method on the initial velocity of the geodesic.
"""
import logging

import numpy as np
import scipy.linalg

from stiefel.frechet.jacobian import assemble_A, jacobian_A_x, jacobian_exp
from stiefel.frechet.kronecker import BlockVecMap, kron_identity_left
from stiefel.manifold import InvalidArgumentError, TangentCoordinates, \
    TangentVector
from stiefel.manifold.core import orthonormal_complement, sym, vec, \
    decompose_tangent, assemble_tangent, canonical_norm, skew_dimension, \
    project_tangent
from stiefel.shooting import ShootingConfig, ShootingReport, \
    SingularJacobianError, LogFailedError, REASON_CONVERGED, \
    REASON_MAX_ITERATIONS, REASON_DIVERGING, REASON_SINGULAR, \
    REASON_STAGNATED
from stiefel.shooting.reduced import reduce_problem, recover_tangent

logger = logging.getLogger('Shooting')

RANK_THRESHOLD = 1e-12
"""Smallest accepted ratio of the extreme singular values of the Jacobian"""


def initial_guess(start, end):
    """Projection-based initial velocity

    The difference ``Y1 - Y0`` projected onto the tangent space at Y0 and
    rescaled to the length of the difference.

    :param stiefel.manifold.StiefelPoint start: Y0
    :param stiefel.manifold.StiefelPoint end: Y1
    :rtype: TangentVector
    """
    if start.shape != end.shape:
        raise InvalidArgumentError('Endpoints have different shapes {} and {}'
                                   .format(start.shape, end.shape))
    norm_diff = np.linalg.norm(end.data - start.data)
    # Projecting once more keeps tangency when the difference is nearly normal
    projected = project_tangent(
        start, end.data - start.data @ sym(start.data.T @ end.data)).ambient
    norm_projected = np.linalg.norm(projected)
    if norm_diff == 0 or norm_projected == 0:
        return TangentVector.zero(start)
    return TangentVector(start, norm_diff / norm_projected * projected)


def _structure_jacobian(n, p):
    """Jacobian of ``vec(A(x))``, rows in column-stacking order"""
    return BlockVecMap(n, p).apply(jacobian_A_x(n, p))


def _jacobian_z1(basis, a, structure, p):
    n = basis.shape[0]
    inner = jacobian_exp(a).matrix[:n * p] @ structure
    return kron_identity_left(basis, inner, p)


def jacobian_Z1_x(start, coords):
    """Jacobian of ``vec(Z1(1))`` with respect to the packed coordinates x

    :param stiefel.manifold.StiefelPoint start: base point Y0
    :param TangentCoordinates coords: coordinates of the current velocity
    :return: np-by-(np - p(p+1)/2) matrix
    :rtype: numpy.ndarray
    """
    n, p = start.shape
    basis = np.hstack([start.data, coords.complement])
    return _jacobian_z1(basis, assemble_A(coords),
                        _structure_jacobian(n, p), p)


def newton_step(f, jacobian):
    """Least squares solution of ``J dx = -F``

    Uses QR with column pivoting, so the rank of J can be checked on the
    diagonal of the triangular factor.

    :param numpy.ndarray f: residual vector
    :param numpy.ndarray jacobian: Jacobian, more rows than columns
    :raise SingularJacobianError: if J is numerically rank deficient
    :rtype: numpy.ndarray
    """
    cols = jacobian.shape[1]
    if cols == 0:
        return np.zeros(0)
    q, r, pivots = scipy.linalg.qr(jacobian, mode='economic', pivoting=True)
    diagonal = np.abs(np.diag(r))
    if diagonal[0] == 0 or diagonal[-1] < RANK_THRESHOLD * diagonal[0]:
        sigma = scipy.linalg.svdvals(jacobian)
        raise SingularJacobianError('Jacobian is numerically rank deficient',
                                    sigma[0], sigma[-1])
    step = np.empty(cols)
    step[pivots] = scipy.linalg.solve_triangular(r, -(q.T @ f))
    return step


def _diverging(residuals, window):
    if len(residuals) <= window:
        return False
    tail = residuals[-window - 1:]
    return all(b > a for a, b in zip(tail, tail[1:]))


def single_shoot(start, end, config=None, complement=None, initial=None):
    """Solve the endpoint geodesic problem by single shooting

    Divergence is not an error: the report then has ``converged=False`` and
    the reason set.

    :param stiefel.manifold.StiefelPoint start: Y0
    :param stiefel.manifold.StiefelPoint end: Y1
    :param ShootingConfig|None config: settings
    :param numpy.ndarray|None complement: orthonormal complement of Y0
    :param TangentVector|None initial: initial velocity; the projection-based
        guess by default
    :rtype: ShootingReport
    """
    if config is None:
        config = ShootingConfig()
    if start.shape != end.shape:
        raise InvalidArgumentError('Endpoints have different shapes {} and {}'
                                   .format(start.shape, end.shape))
    n, p = start.shape
    if complement is None:
        complement = orthonormal_complement(start)
    basis = np.hstack([start.data, complement])
    if initial is None:
        initial = initial_guess(start, end)
    x = decompose_tangent(initial, complement).packed
    structure = _structure_jacobian(n, p)
    s = skew_dimension(p)

    def mismatch(a):
        z1 = basis @ scipy.linalg.expm(a.matrix)[:, :p]
        return vec(z1 - end.data)

    residuals = []
    mismatches = []
    reason = REASON_MAX_ITERATIONS
    for iteration in range(1, config.max_iter + 1):
        a = assemble_A(TangentCoordinates.from_packed(start, complement, x))
        f = mismatch(a)
        try:
            step = newton_step(f, _jacobian_z1(basis, a, structure, p))
        except SingularJacobianError as e:
            if np.linalg.norm(f) <= config.tol_residual:
                # Already solved, at a point of the cut locus
                reason = REASON_CONVERGED
                break
            logger.warning('Single shooting stopped at iteration {}: {}'
                           .format(iteration, e))
            reason = REASON_SINGULAR
            break
        x = x + step
        residual = np.sqrt(2 * np.sum(step[:s] ** 2) + np.sum(step[s:] ** 2))
        residuals.append(residual)
        mismatches.append(np.linalg.norm(f))
        logger.debug('Iteration {}: |F| = {:.3e}, |delta xi| = {:.3e}'
                     .format(iteration, mismatches[-1], residual))
        if residual <= config.tol_residual:
            reason = REASON_CONVERGED
            break
        if _diverging(residuals, config.divergence_window):
            reason = REASON_DIVERGING
            break

    coords = TangentCoordinates.from_packed(start, complement, x)
    final = np.linalg.norm(mismatch(assemble_A(coords)))
    if reason == REASON_CONVERGED and final > config.tol_mismatch:
        reason = REASON_STAGNATED
    converged = reason == REASON_CONVERGED
    xi = assemble_tangent(coords)
    distance = canonical_norm(start, xi) if converged else None
    if not converged:
        logger.debug('Single shooting failed ({}), final mismatch {:.3e}'
                     .format(reason, final))
    return ShootingReport(xi, converged, residuals, mismatches, distance,
                          reason, 'full', final)


def _use_reduced(config, n, p):
    if config.use_reduced == 'full':
        return False
    if config.use_reduced == 'auto':
        return 2 * p < n
    if 2 * p > n:
        raise InvalidArgumentError('Reduced formulation needs 2p <= n, got '
                                   'n={}, p={}'.format(n, p))
    if 2 * p == n:
        logger.warning('Reduced formulation requested for n = 2p, where it '
                       'has the size of the full one')
    return True


def stiefel_log(start, end, config=None):
    """Riemannian logarithm ``Log_Y0(Y1)`` by single shooting

    Dispatches between the full formulation and the St(2p, p) one according
    to ``config.use_reduced``.

    :param stiefel.manifold.StiefelPoint start: Y0
    :param stiefel.manifold.StiefelPoint end: Y1
    :param ShootingConfig|None config: settings
    :rtype: ShootingReport
    """
    if config is None:
        config = ShootingConfig()
    if start.shape != end.shape:
        raise InvalidArgumentError('Endpoints have different shapes {} and {}'
                                   .format(start.shape, end.shape))
    n, p = start.shape
    if not _use_reduced(config, n, p):
        report = single_shoot(start, end, config)
    else:
        problem = reduce_problem(start, end)
        hat = single_shoot(problem.hat_start, problem.hat_end, config,
                           complement=problem.hat_complement)
        xi = recover_tangent(problem, hat.xi)
        distance = canonical_norm(start, xi) if hat.converged else None
        report = ShootingReport(xi, hat.converged, hat.residual_history,
                                hat.mismatch_history, distance, hat.reason,
                                'reduced', hat.final_mismatch)
    if report.converged:
        logger.debug('Logarithm on St({}, {}) converged in {} iterations, '
                     'distance {:.12g}'.format(n, p, report.iterations,
                                               report.distance))
    return report


def stiefel_distance(start, end, config=None):
    """Canonical distance between two points

    :raise LogFailedError: if the logarithm does not converge
    :rtype: float
    """
    report = stiefel_log(start, end, config)
    if not report.converged:
        raise LogFailedError('Logarithm did not converge', report)
    return report.distance


def jacobian_diagnostics(start, xi):
    """Numerical rank and condition number of the shooting Jacobian at xi

    The rank counts singular values above ``sigma_max * max(shape) * eps``.

    :param stiefel.manifold.StiefelPoint start: base point
    :param TangentVector xi: velocity at which the Jacobian is evaluated
    :rtype: (int, float)
    """
    jacobian = jacobian_Z1_x(start, decompose_tangent(xi))
    sigma = scipy.linalg.svdvals(jacobian)
    if sigma.size == 0:
        return 0, 1.0
    threshold = sigma[0] * max(jacobian.shape) * np.finfo(float).eps
    rank = int(np.sum(sigma > threshold))
    condition = sigma[0] / sigma[-1] if sigma[-1] > 0 else np.inf
    return rank, float(condition)
