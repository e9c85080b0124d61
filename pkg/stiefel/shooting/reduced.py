"""
The equivalent endpoint problem on St(2p, p).

With ``M = Y0^T Y1`` and the QR decomposition ``Y0_perp^T Y1 = Q N`` the
geodesic from Y0 to Y1 lives in the span of ``[Y0, Y0_perp Q]``, so it can be
computed between ``[I; 0]`` and ``[M; N]`` in St(2p, p) and mapped back.
"""
import logging

import numpy as np
import scipy.linalg

from stiefel.manifold import InvalidArgumentError, StiefelPoint, \
    TangentVector
from stiefel.manifold.core import orthonormal_complement

logger = logging.getLogger('Shooting')

SINGULAR_N_TOLERANCE = 1e-12


class ReducedProblem:
    """
    Data of the reduced formulation of the endpoint problem from Y0 to Y1.
    """
    __slots__ = ['base', 'complement', 'm', 'n_mat', 'q', 'hat_start',
                 'hat_end', 'hat_complement', 'n_singular']

    def __init__(self, base, complement, m, n_mat, q):
        """Constructor

        :param StiefelPoint base: starting point Y0
        :param numpy.ndarray complement: orthonormal complement of Y0
        :param numpy.ndarray m: ``Y0^T Y1``
        :param numpy.ndarray n_mat: triangular factor N
        :param numpy.ndarray q: orthonormal factor Q
        """
        p = base.p
        self.base = base
        self.complement = complement
        self.m = m
        self.n_mat = n_mat
        self.q = q
        self.hat_start = StiefelPoint(np.eye(2 * p, p))
        self.hat_end = StiefelPoint(np.vstack([m, n_mat]))
        self.hat_complement = np.vstack([np.zeros((p, p)), np.eye(p)])
        diagonal = np.abs(np.diag(n_mat))
        self.n_singular = bool(
            diagonal.min() < SINGULAR_N_TOLERANCE * max(1.0, diagonal.max()))

    def __repr__(self):
        return 'ReducedProblem(n={}, p={})'.format(self.base.n, self.base.p)


def reduce_problem(start, end, complement=None):
    """Build the St(2p, p) formulation of the problem from Y0 to Y1

    :param StiefelPoint start: Y0
    :param StiefelPoint end: Y1
    :param numpy.ndarray|None complement: orthonormal complement of Y0
    :rtype: ReducedProblem
    """
    if start.shape != end.shape:
        raise InvalidArgumentError('Endpoints have different shapes {} and {}'
                                   .format(start.shape, end.shape))
    n, p = start.shape
    if 2 * p > n:
        raise InvalidArgumentError('Reduced formulation needs 2p <= n, got '
                                   'n={}, p={}'.format(n, p))
    if complement is None:
        complement = orthonormal_complement(start)
    m = start.data.T @ end.data
    q, n_mat = scipy.linalg.qr(complement.T @ end.data, mode='economic')
    # Nonnegative diagonal of N makes Q unique
    signs = np.sign(np.diag(n_mat))
    signs[signs == 0] = 1
    q = q * signs
    n_mat = signs[:, np.newaxis] * n_mat
    problem = ReducedProblem(start, complement, m, n_mat, q)
    if problem.n_singular:
        logger.debug('Factor N of the reduced problem is singular')
    return problem


def recover_tangent(problem, hat_xi):
    """Map a tangent vector of the reduced problem back to St(n, p)

    ``xi = Y0 Omega + Y0_perp Q R`` where ``Omega`` and ``R`` are the upper
    and lower blocks of the reduced tangent vector.

    :param ReducedProblem problem: reduced problem
    :param TangentVector hat_xi: tangent vector at ``[I; 0]``
    :rtype: TangentVector
    """
    p = problem.base.p
    omega = hat_xi.ambient[:p]
    r = hat_xi.ambient[p:]
    ambient = problem.base.data @ omega + problem.complement @ (problem.q @ r)
    return TangentVector(problem.base, ambient)
