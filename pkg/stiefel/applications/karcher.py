"""
Riemannian center of mass (Karcher mean) of points on St(n, p).
"""
import logging

import numpy as np
import scipy.linalg

from stiefel.manifold import InvalidArgumentError, TangentVector
from stiefel.manifold.core import canonical_norm, polar_projection
from stiefel.manifold.geodesic import stiefel_exp
from stiefel.shooting import ShootingConfig, LogFailedError, _positive
from stiefel.shooting.leapfrog import LFMSConfig, lfms
from stiefel.shooting.single import stiefel_log

logger = logging.getLogger('Applications')


class KarcherConfig:
    """
    Settings of the Karcher mean iteration

    :ivar float tol: tolerance on the canonical norm of the mean logarithm
    :ivar int max_iter: maximum number of iterations
    :ivar ShootingConfig shooting: settings of the logarithms
    :ivar LFMSConfig|None lfms: if set, logarithms failing by single
        shooting are retried with LFMS
    """

    def __init__(self, tol=1e-8, max_iter=100, shooting=None, lfms=None):
        self.tol = _positive('tol', float(tol))
        self.max_iter = int(_positive('max_iter', max_iter))
        self.shooting = shooting if shooting is not None else ShootingConfig()
        self.lfms = lfms

    @classmethod
    def from_settings(cls, settings, section='karcher'):
        return cls(shooting=ShootingConfig.from_settings(settings),
                   **settings.typed_section(section, floats=('tol',),
                                            ints=('max_iter',)))


class KarcherResult:
    __slots__ = ['mean', 'iterations', 'gradient_norm', 'converged']

    def __init__(self, mean, iterations, gradient_norm, converged):
        self.mean = mean
        self.iterations = iterations
        self.gradient_norm = gradient_norm
        self.converged = converged

    def __repr__(self):
        return 'KarcherResult(iterations={}, gradient_norm={:.3e})'.format(
            self.iterations, self.gradient_norm)


def logarithm(start, end, config, label=None):
    """Logarithm used by the applications, with the optional LFMS fallback

    :param stiefel.manifold.StiefelPoint start: base point
    :param stiefel.manifold.StiefelPoint end: target point
    :param KarcherConfig config: settings
    :param str|None label: name of the pair for error messages
    :raise LogFailedError: if no method converges
    :rtype: TangentVector
    """
    report = stiefel_log(start, end, config.shooting)
    if report.converged:
        return report.xi
    if config.lfms is not None:
        logger.warning('Single shooting failed for {}, trying LFMS'
                       .format(label))
        fallback = lfms(start, end, config.lfms)
        if fallback.converged:
            return fallback.xi
    raise LogFailedError('Logarithm did not converge', report, label)


def _initial_mean(points):
    average = sum(q.data for q in points) / len(points)
    if scipy.linalg.svdvals(average).min() > 1e-8:
        return polar_projection(average)
    return points[0]


def karcher_iterate(points, config=None, initial=None):
    """Fixed-point iteration ``mu <- Exp_mu(mean_i Log_mu(q_i))``

    Starts from the projection of the Euclidean average of the points onto
    the manifold, which does not depend on their order.

    :param list[stiefel.manifold.StiefelPoint] points: data points
    :param KarcherConfig|None config: settings
    :param stiefel.manifold.StiefelPoint|None initial: starting point
    :raise LogFailedError: if a logarithm fails
    :rtype: KarcherResult
    """
    if config is None:
        config = KarcherConfig()
    if not points:
        raise InvalidArgumentError('Karcher mean of an empty set')
    shape = points[0].shape
    if any(q.shape != shape for q in points):
        raise InvalidArgumentError('Points have different shapes')
    mean = initial if initial is not None else _initial_mean(points)
    gradient_norm = np.inf
    for iteration in range(1, config.max_iter + 1):
        logs = [logarithm(mean, q, config, 'mean, point {}'.format(i + 1))
                for i, q in enumerate(points)]
        gradient = TangentVector(
            mean, sum(xi.ambient for xi in logs) / len(points), check=False)
        gradient_norm = canonical_norm(mean, gradient)
        logger.debug('Karcher iteration {}: gradient norm {:.3e}'
                     .format(iteration, gradient_norm))
        if gradient_norm <= config.tol:
            return KarcherResult(mean, iteration, gradient_norm, True)
        mean = stiefel_exp(mean, gradient).point
    logger.warning('Karcher mean did not converge in {} iterations, gradient '
                   'norm {:.3e}'.format(config.max_iter, gradient_norm))
    return KarcherResult(mean, config.max_iter, gradient_norm, False)


def karcher_mean(points, config=None):
    """Karcher mean of points on St(n, p)

    :param list[stiefel.manifold.StiefelPoint] points: data points
    :param KarcherConfig|None config: settings
    :raise LogFailedError: if a logarithm fails or the iteration does not
        converge
    :rtype: stiefel.manifold.StiefelPoint
    """
    result = karcher_iterate(points, config)
    if not result.converged:
        raise LogFailedError('Karcher mean did not converge (gradient norm '
                             '{:.3e})'.format(result.gradient_norm))
    return result.mean
