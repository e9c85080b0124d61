"""
Probability densities on a uniform grid as points of the unit sphere
St(m, 1), through their half-density (square root) representation.
"""
import logging

import numpy as np
import scipy.integrate

from stiefel.applications.karcher import karcher_mean
from stiefel.manifold import InvalidArgumentError, StiefelPoint
from stiefel.manifold.io import read_table, FloatField, ParseError

logger = logging.getLogger('Applications')

MASS_TOLERANCE = 1e-3


def trapezoid_weights(m, h):
    """Trapezoid rule weights of an m-point grid with spacing h

    :rtype: numpy.ndarray
    """
    weights = np.full(m, float(h))
    weights[[0, -1]] /= 2
    return weights


def pdf_to_halfdensity(density, h):
    """Half-density representation ``q = sqrt(g w)`` normalized to unit norm

    The weights w are those of the trapezoid rule, so that ``|q|^2`` is the
    trapezoid integral of g and a density of unit mass maps to a unit vector
    without rescaling.

    :param numpy.ndarray density: nonnegative samples g on a uniform grid
    :param float h: grid spacing
    :raise InvalidArgumentError: on negative samples or a zero density
    :rtype: StiefelPoint
    """
    density = np.asarray(density, dtype=float).ravel()
    if h <= 0:
        raise InvalidArgumentError('Grid spacing must be positive, got {}'
                                   .format(h))
    if density.size < 2:
        raise InvalidArgumentError('Need at least two samples, got {}'
                                   .format(density.size))
    if np.any(density < 0):
        raise InvalidArgumentError('Density has negative samples',
                                   float(-density.min()))
    mass = scipy.integrate.trapezoid(density, dx=h)
    if mass <= 0:
        raise InvalidArgumentError('Density integrates to zero')
    if abs(mass - 1) > MASS_TOLERANCE:
        logger.warning('Density integrates to {:.6g}, rescaling'.format(mass))
    q = np.sqrt(density * trapezoid_weights(density.size, h))
    return StiefelPoint((q / np.linalg.norm(q))[:, np.newaxis])


def halfdensity_to_pdf(point, h, return_clamped=False):
    """Density ``g = q^2 / w`` of a half-density, w the trapezoid weights

    Negative entries, which a point of the sphere away from the nonnegative
    orthant may have, are clamped to zero first. The clamped mass is measured
    with the same quadrature.

    :param StiefelPoint point: m-by-1 point
    :param float h: grid spacing
    :param bool return_clamped: also return the clamped mass
    :return: density, or ``(density, clamped mass)``
    """
    if point.p != 1:
        raise InvalidArgumentError('Half-densities are m-by-1 points, got '
                                   'p = {}'.format(point.p))
    q = point.data[:, 0]
    negative = q < 0
    clamped = float(np.sum(q[negative] ** 2))
    if clamped > 0:
        logger.warning('Clamped negative half-density entries carrying mass '
                       '{:.3e}'.format(clamped))
    density = np.where(negative, 0.0, q) ** 2 / trapezoid_weights(q.size, h)
    if return_clamped:
        return density, clamped
    return density


def halfdensity_mean(densities, h, config=None):
    """Density of the Karcher mean of half-density representations

    :param list densities: densities sampled on the same grid
    :param float h: grid spacing
    :param stiefel.applications.karcher.KarcherConfig|None config: settings
    :rtype: numpy.ndarray
    """
    points = [pdf_to_halfdensity(g, h) for g in densities]
    return halfdensity_to_pdf(karcher_mean(points, config), h)


def load_pdf(source):
    """Read a density from a CSV file of (grid, value) rows

    :param source: path or open text file
    :return: ``(grid, values, h)``
    :raise ParseError: on malformed content or a non-uniform grid
    """
    rows = np.array(read_table(source, [FloatField(), FloatField()]))
    grid, values = rows[:, 0], rows[:, 1]
    if grid.size < 2:
        raise ParseError('Need at least two grid points', source)
    steps = np.diff(grid)
    h = steps.mean()
    if h <= 0 or np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(h)):
        raise ParseError('Grid is not uniform and increasing', source)
    return grid, values, h
