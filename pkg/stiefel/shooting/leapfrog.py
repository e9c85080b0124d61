"""
Leapfrog initialization and the combined single shooting, leapfrog and
multiple shooting solver (LFMS).

Leapfrog keeps the endpoints fixed and repeatedly moves each interior
junction of a broken geodesic to the midpoint of the geodesic joining its
two neighbors, shortening the path until the velocities at the junctions
almost agree. Multiple shooting then removes the remaining kinks.
"""
import logging

import numpy as np
import scipy.linalg

from stiefel.manifold import InvalidArgumentError, ManifoldError
from stiefel.manifold.core import canonical_norm, polar_projection
from stiefel.manifold.geodesic import stiefel_exp
from stiefel.shooting import ShootingConfig, REASON_PARTITION_LIMIT, \
    _positive
from stiefel.shooting.multiple import BrokenGeodesic, MSReport, \
    MultipleShootingConfig, multiple_shoot, residual_F
from stiefel.shooting.single import stiefel_log
from stiefel.trace import TraceCollector, PHASE_SINGLE, PHASE_LEAPFROG, \
    PHASE_MULTIPLE

logger = logging.getLogger('Leapfrog')

RANK_TOLERANCE = 1e-10
JITTER = 1e-6
JITTER_ATTEMPTS = 3


class LeapfrogError(ManifoldError):
    """Raised when a leapfrog step cannot be carried out"""

    def __init__(self, message, segment=None):
        """Constructor

        :param str message: message to show
        :param int|None segment: 1-based index of the offending segment
        """
        super().__init__(message)
        self.message = message
        self.segment = segment

    def __str__(self):
        if self.segment is not None:
            return '{} (segment {})'.format(self.message, self.segment)
        return self.message


class LFMSConfig:
    """
    Settings of the LFMS solver

    :ivar int ss_max_iter: Newton iterations of every single shooting run
    :ivar float lf_handover_tol: ``||F||`` at which leapfrog hands over to
        multiple shooting
    :ivar int lf_initial_m: number of junctions leapfrog starts with
    :ivar int lf_max_m: largest number of junctions tried
    :ivar int lf_max_sweeps: sweeps allowed for a single partition
    :ivar float ms_tol: multiple shooting tolerance on ``||F||``
    :ivar int ms_max_iter: multiple shooting Newton iterations
    :ivar bool force_leapfrog: skip the initial single shooting attempt
    :ivar int seed: seed of the jitter applied to degenerate chord points
    """

    def __init__(self, ss_max_iter=10, lf_handover_tol=1e-3, lf_initial_m=3,
                 lf_max_m=16, lf_max_sweeps=500, ms_tol=1e-12,
                 ms_max_iter=10, force_leapfrog=False, seed=0):
        self.ss_max_iter = int(_positive('ss_max_iter', ss_max_iter))
        self.lf_handover_tol = _positive('lf_handover_tol',
                                         float(lf_handover_tol))
        self.lf_initial_m = int(lf_initial_m)
        self.lf_max_m = int(lf_max_m)
        self.lf_max_sweeps = int(_positive('lf_max_sweeps', lf_max_sweeps))
        self.ms_tol = _positive('ms_tol', float(ms_tol))
        self.ms_max_iter = int(_positive('ms_max_iter', ms_max_iter))
        self.force_leapfrog = bool(force_leapfrog)
        self.seed = seed
        if self.lf_initial_m < 3:
            raise InvalidArgumentError('Leapfrog needs at least 3 junctions, '
                                       'got {}'.format(lf_initial_m))
        if self.lf_max_m < self.lf_initial_m:
            raise InvalidArgumentError('lf_max_m ({}) is smaller than '
                                       'lf_initial_m ({})'
                                       .format(lf_max_m, lf_initial_m))
        if self.lf_handover_tol <= self.ms_tol:
            raise InvalidArgumentError('Handover tolerance must exceed the '
                                       'multiple shooting tolerance')

    @classmethod
    def from_settings(cls, settings, section='lfms'):
        return cls(**cls.settings_values(settings, section))

    @classmethod
    def settings_values(cls, settings, section='lfms'):
        """Keyword arguments of the constructor read from the settings"""
        return settings.typed_section(
            section, floats=('lf_handover_tol', 'ms_tol'),
            ints=('ss_max_iter', 'lf_initial_m', 'lf_max_m', 'lf_max_sweeps',
                  'ms_max_iter', 'seed'))

    @property
    def shooting(self):
        return ShootingConfig(max_iter=self.ss_max_iter)

    @property
    def multiple(self):
        return MultipleShootingConfig(tol=self.ms_tol,
                                      max_iter=self.ms_max_iter)


class LeapfrogState:
    """
    Junction points of a broken geodesic with the single shooting velocity
    of every segment.

    ``f_norm`` is the norm of the multiple shooting residual of the broken
    geodesic built by :meth:`to_broken_geodesic` and ``length`` the sum of
    the segment lengths.
    """
    __slots__ = ['junctions', 'tangents', 'length', 'f_norm']

    def __init__(self, junctions, tangents):
        """Constructor

        :param list[stiefel.manifold.StiefelPoint] junctions: m points, the
            first and the last being the endpoints
        :param list[stiefel.manifold.TangentVector] tangents: m - 1 velocities
            of the segments
        """
        self.junctions = list(junctions)
        self.tangents = list(tangents)
        self.length = float(sum(canonical_norm(x.base, x)
                                for x in self.tangents))
        self.f_norm = float(np.linalg.norm(residual_F(
            self.to_broken_geodesic(), self.junctions[0],
            self.junctions[-1])))

    @property
    def m(self):
        return len(self.junctions)

    def to_broken_geodesic(self):
        """Junction data for multiple shooting

        The velocity at the last junction is the end velocity of the last
        segment.
        """
        last = stiefel_exp(self.junctions[-2], self.tangents[-1])
        return BrokenGeodesic(
            [x.data for x in self.junctions],
            [x.ambient for x in self.tangents] + [last.velocity.ambient])

    def __repr__(self):
        return 'LeapfrogState(m={}, length={:.12g}, f_norm={:.3e})'.format(
            self.m, self.length, self.f_norm)


def _shoot(start, end, config, segment):
    report = stiefel_log(start, end, config.shooting)
    if not report.converged:
        raise LeapfrogError('Single shooting failed ({})'
                            .format(report.reason), segment)
    return report.xi


def _chord_point(start, end, t, rng):
    chord = (1 - t) * start.data + t * end.data
    for attempt in range(JITTER_ATTEMPTS + 1):
        if scipy.linalg.svdvals(chord).min() > RANK_TOLERANCE:
            return polar_projection(chord)
        logger.debug('Chord point at t = {:.3f} is rank deficient, attempt '
                     '{}'.format(t, attempt + 1))
        chord = chord + JITTER * rng.standard_normal(chord.shape)
    raise LeapfrogError('Chord point at t = {:.3f} stays rank deficient'
                        .format(t))


def leapfrog_init(start, end, m, config=None):
    """Initial broken geodesic through projected chord points

    Junction k is the closest point of the manifold to
    ``(1 - t) X + t Y``, ``t = k / (m - 1)``.

    :param stiefel.manifold.StiefelPoint start: X
    :param stiefel.manifold.StiefelPoint end: Y
    :param int m: number of junctions, at least 3
    :param LFMSConfig|None config: settings
    :raise LeapfrogError: if a chord point or a segment cannot be handled
    :rtype: LeapfrogState
    """
    if config is None:
        config = LFMSConfig()
    if m < 3:
        raise InvalidArgumentError('Leapfrog needs at least 3 junctions, got '
                                   '{}'.format(m))
    if start.shape != end.shape:
        raise InvalidArgumentError('Endpoints have different shapes {} and {}'
                                   .format(start.shape, end.shape))
    rng = np.random.default_rng(config.seed)
    junctions = [start]
    for k in range(1, m - 1):
        junctions.append(_chord_point(start, end, k / (m - 1), rng))
    junctions.append(end)
    tangents = [_shoot(junctions[k], junctions[k + 1], config, k + 1)
                for k in range(m - 1)]
    return LeapfrogState(junctions, tangents)


def leapfrog_sweep(state, config=None):
    """One sweep over the interior junctions, in order

    :param LeapfrogState state: current state
    :param LFMSConfig|None config: settings
    :raise LeapfrogError: if a neighbor pair cannot be joined
    :rtype: LeapfrogState
    """
    if config is None:
        config = LFMSConfig()
    junctions = list(state.junctions)
    for j in range(1, state.m - 1):
        xi = _shoot(junctions[j - 1], junctions[j + 1], config, j)
        junctions[j] = stiefel_exp(junctions[j - 1], xi, 0.5).point
    tangents = [_shoot(junctions[k], junctions[k + 1], config, k + 1)
                for k in range(state.m - 1)]
    result = LeapfrogState(junctions, tangents)
    if result.length > state.length + 1e-12 * max(1.0, state.length):
        logger.warning('Leapfrog sweep increased the length from {:.15g} to '
                       '{:.15g}'.format(state.length, result.length))
    return result


def _run_leapfrog(start, end, m, config, trace):
    state = leapfrog_init(start, end, m, config)
    trace.add(PHASE_LEAPFROG, 0, state.f_norm, state.length, m)
    sweeps = 0
    while state.f_norm > config.lf_handover_tol:
        if sweeps == config.lf_max_sweeps:
            raise LeapfrogError('No handover after {} sweeps'.format(sweeps))
        state = leapfrog_sweep(state, config)
        sweeps += 1
        trace.add(PHASE_LEAPFROG, sweeps, state.f_norm, state.length, m)
    logger.info('Leapfrog with m = {} reached |F| = {:.3e} after {} sweeps'
                .format(m, state.f_norm, sweeps))
    return state, sweeps


def lfms(start, end, config=None):
    """Logarithm by single shooting, falling back to leapfrog followed by
    multiple shooting with a growing number of junctions

    :param stiefel.manifold.StiefelPoint start: X
    :param stiefel.manifold.StiefelPoint end: Y
    :param LFMSConfig|None config: settings
    :rtype: MSReport
    """
    if config is None:
        config = LFMSConfig()
    trace = TraceCollector()
    if not config.force_leapfrog:
        report = stiefel_log(start, end, config.shooting)
        for i, value in enumerate(report.mismatch_history, start=1):
            trace.add(PHASE_SINGLE, i, value)
        if report.converged:
            logger.info('Single shooting converged in {} iterations'
                        .format(report.iterations))
            return MSReport(
                True, report.mismatch_history + [report.final_mismatch], [],
                BrokenGeodesic.sample_geodesic(start, report.xi, 2),
                report.xi, report.distance, report.reason, path='single',
                trace=trace)
        logger.info('Single shooting failed ({}), switching to leapfrog'
                    .format(report.reason))

    for m in range(config.lf_initial_m, config.lf_max_m + 1):
        try:
            state, sweeps = _run_leapfrog(start, end, m, config, trace)
        except LeapfrogError as e:
            logger.info('Leapfrog with m = {} failed: {}'.format(m, e))
            continue
        result = multiple_shoot(state.to_broken_geodesic(), start, end,
                                config.multiple)
        for i, (value, length) in enumerate(zip(result.f_history,
                                                result.length_history)):
            trace.add(PHASE_MULTIPLE, i, value, length, m)
        if result.converged:
            result.path = 'lfms'
            result.sweeps = sweeps
            result.trace = trace
            logger.info('Multiple shooting with m = {} converged in {} '
                        'iterations'.format(m, result.iterations))
            return result
        logger.info('Multiple shooting with m = {} failed ({})'
                    .format(m, result.reason))

    logger.warning('LFMS failed up to m = {}'.format(config.lf_max_m))
    return MSReport(False, [], [], None, None, None, REASON_PARTITION_LIMIT,
                    path='lfms', trace=trace)
