"""
Interpolation of parameter-dependent orthonormal bases in the tangent space
of a reference basis.
"""
import json
import logging
import os

import numpy as np
import scipy.interpolate

from stiefel.applications.karcher import KarcherConfig, logarithm
from stiefel.manifold import InvalidArgumentError, TangentCoordinates
from stiefel.manifold.core import orthonormal_complement, \
    decompose_tangent, manifold_dimension
from stiefel.manifold.geodesic import exp_from_coordinates
from stiefel.manifold.io import load_point, ParseError

logger = logging.getLogger('Applications')

METHODS = ('linear', 'cubic-spline', 'monotone-cubic')


class BasisFamily:
    """
    Orthonormal bases ``V_i`` sampled at increasing parameters ``p_i``.
    """
    __slots__ = ['bases', 'parameters', 'reference']

    def __init__(self, bases, parameters, reference=0):
        """Constructor

        :param list[stiefel.manifold.StiefelPoint] bases: the bases
        :param parameters: strictly increasing parameter values
        :param int reference: index of the basis whose tangent space is used
        """
        parameters = np.asarray(parameters, dtype=float)
        if len(bases) < 2 or len(bases) != parameters.size:
            raise InvalidArgumentError('Need at least two bases and one '
                                       'parameter per basis')
        if np.any(np.diff(parameters) <= 0):
            raise InvalidArgumentError('Parameters must be strictly '
                                       'increasing')
        if any(v.shape != bases[0].shape for v in bases):
            raise InvalidArgumentError('Bases have different shapes')
        if not 0 <= reference < len(bases):
            raise InvalidArgumentError('Invalid reference index {}'
                                       .format(reference))
        self.bases = list(bases)
        self.parameters = parameters
        self.reference = reference

    @classmethod
    def from_manifest(cls, path):
        """Load a family described by a JSON manifest

        The manifest holds ``{"reference": 0, "bases": [{"file": "V1.csv",
        "parameter": 0.1}, ...]}``; file names are relative to the manifest.

        :param str path: path of the manifest
        :rtype: BasisFamily
        """
        try:
            with open(path) as f:
                manifest = json.load(f)
            entries = manifest['bases']
            directory = os.path.dirname(path)
            bases = [load_point(os.path.join(directory, e['file']))
                     for e in entries]
            parameters = [float(e['parameter']) for e in entries]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise ParseError('Invalid basis family manifest: {}'.format(e),
                             path)
        return cls(bases, parameters, manifest.get('reference', 0))

    @property
    def reference_basis(self):
        return self.bases[self.reference]


class TangentInterpolator:
    """
    Interpolates the packed coordinates of ``Log_{V_ref}(V_i)`` and maps the
    result back with the exponential.

    The logarithms are computed once, at construction.
    """

    def __init__(self, family, method='linear', config=None):
        """Constructor

        :param BasisFamily family: the sampled bases
        :param str method: ``linear``, ``cubic-spline`` or ``monotone-cubic``
        :param KarcherConfig|None config: logarithm settings
        :raise LogFailedError: if a logarithm fails
        """
        if method not in METHODS:
            raise InvalidArgumentError('Unknown interpolation method {!r}, '
                                       'expected one of {}'
                                       .format(method, METHODS))
        if config is None:
            config = KarcherConfig()
        self.family = family
        self.method = method
        reference = family.reference_basis
        self.complement = orthonormal_complement(reference)
        values = []
        for i, basis in enumerate(family.bases):
            if i == family.reference:
                xi_packed = np.zeros(manifold_dimension(*reference.shape))
            else:
                xi = logarithm(reference, basis, config,
                               'reference, basis {}'.format(i + 1))
                xi_packed = decompose_tangent(xi, self.complement).packed
            values.append(xi_packed)
        values = np.array(values)
        logger.debug('Computed {} logarithms at the reference basis {}'
                     .format(len(values) - 1, family.reference + 1))
        parameters = family.parameters
        if method == 'linear':
            self._interpolant = scipy.interpolate.interp1d(
                parameters, values, axis=0, kind='linear')
        elif method == 'cubic-spline':
            self._interpolant = scipy.interpolate.CubicSpline(
                parameters, values, axis=0)
        else:
            self._interpolant = scipy.interpolate.PchipInterpolator(
                parameters, values, axis=0)

    def __call__(self, parameter):
        """Interpolated basis at a parameter value

        :param float parameter: value within the sampled range
        :raise InvalidArgumentError: on extrapolation
        :rtype: stiefel.manifold.StiefelPoint
        """
        low, high = self.family.parameters[[0, -1]]
        if not low <= parameter <= high:
            raise InvalidArgumentError('Parameter {} outside of the sampled '
                                       'range [{}, {}]'
                                       .format(parameter, low, high))
        packed = np.asarray(self._interpolant(parameter), dtype=float)
        coords = TangentCoordinates.from_packed(
            self.family.reference_basis, self.complement, packed)
        return exp_from_coordinates(coords).point


def tangent_interpolate(family, parameter, method='linear', config=None):
    """Interpolate a basis family at a parameter value

    :param BasisFamily family: the sampled bases
    :param float parameter: value within the sampled range
    :param str method: ``linear``, ``cubic-spline`` or ``monotone-cubic``
    :param KarcherConfig|None config: logarithm settings
    :rtype: stiefel.manifold.StiefelPoint
    """
    return TangentInterpolator(family, method, config)(parameter)
