"""
Shooting methods for the endpoint geodesic problem on St(n, p).

``single`` implements the Newton iteration on the initial velocity,
``reduced`` its St(2p, p) formulation, ``multiple`` multiple shooting over a
broken geodesic and ``leapfrog`` the global initialization driving it.
"""
from stiefel.manifold import InvalidArgumentError, ManifoldError

REASON_CONVERGED = 'converged'
REASON_MAX_ITERATIONS = 'max-iterations'
REASON_DIVERGING = 'diverging'
REASON_SINGULAR = 'singular-jacobian'
REASON_STAGNATED = 'stagnated'
REASON_PARTITION_LIMIT = 'partition-limit'

FORMULATIONS = ('auto', 'full', 'reduced')


class SingularJacobianError(ManifoldError):
    """
    Raised when the Newton Jacobian is numerically rank deficient, which
    signals proximity to the cut locus.
    """

    def __init__(self, message, sigma_max, sigma_min):
        super().__init__(message)
        self.message = message
        self.sigma_max = sigma_max
        self.sigma_min = sigma_min

    def __str__(self):
        return '{} (sigma_max: {:.3e}, sigma_min: {:.3e})'.format(
            self.message, self.sigma_max, self.sigma_min)


class LogFailedError(ManifoldError):
    """Raised when a logarithm needed by a higher-level operation fails"""

    def __init__(self, message, report=None, label=None):
        """Constructor

        :param str message: message to show
        :param report: report of the failed computation
        :param str|None label: name of the offending pair of points
        """
        super().__init__(message)
        self.message = message
        self.report = report
        self.label = label

    def __str__(self):
        parts = [self.message]
        if self.label is not None:
            parts.append('pair: {}'.format(self.label))
        if self.report is not None:
            parts.append('reason: {}'.format(self.report.reason))
        return '; '.join(parts)


def _positive(name, value):
    if not value > 0:
        raise InvalidArgumentError('{} must be positive, got {}'
                                   .format(name, value))
    return value


class ShootingConfig:
    """
    Settings of the single shooting method

    :ivar float tol_residual: stopping tolerance on ``||delta xi||``
    :ivar int max_iter: maximum number of Newton iterations
    :ivar str use_reduced: ``auto``, ``full`` or ``reduced``
    :ivar float tol_mismatch: largest endpoint mismatch accepted on success
    :ivar int divergence_window: consecutive residual increases treated as
        divergence
    """

    def __init__(self, tol_residual=1e-13, max_iter=10, use_reduced='auto',
                 tol_mismatch=1e-8, divergence_window=3):
        self.tol_residual = _positive('tol_residual', float(tol_residual))
        self.max_iter = int(max_iter)
        if self.max_iter < 1:
            raise InvalidArgumentError('max_iter must be at least 1, got {}'
                                       .format(max_iter))
        if use_reduced not in FORMULATIONS:
            raise InvalidArgumentError(
                'use_reduced must be one of {}, got {!r}'
                .format(FORMULATIONS, use_reduced))
        self.use_reduced = use_reduced
        self.tol_mismatch = _positive('tol_mismatch', float(tol_mismatch))
        self.divergence_window = int(
            _positive('divergence_window', divergence_window))

    @classmethod
    def from_settings(cls, settings, section='shooting'):
        """Build the configuration from a section of the settings

        :param stiefel.settings.Settings settings: application settings
        :param str section: key of the section
        :rtype: ShootingConfig
        """
        return cls(**settings.typed_section(
            section, floats=('tol_residual', 'tol_mismatch'),
            ints=('max_iter', 'divergence_window')))

    def replace(self, **kwargs):
        """Return a copy with some of the values changed"""
        values = self.as_dict()
        values.update(kwargs)
        return ShootingConfig(**values)

    def as_dict(self):
        return {
            'tol_residual': self.tol_residual,
            'max_iter': self.max_iter,
            'use_reduced': self.use_reduced,
            'tol_mismatch': self.tol_mismatch,
            'divergence_window': self.divergence_window,
        }


class ShootingReport:
    """
    Result of single shooting

    ``residual_history`` holds ``||delta xi||`` and ``mismatch_history``
    holds ``||Z1(1) - Y1||_F`` for every Newton iteration taken.
    """
    __slots__ = ['xi', 'converged', 'residual_history', 'mismatch_history',
                 'distance', 'reason', 'formulation', 'final_mismatch']

    def __init__(self, xi, converged, residual_history, mismatch_history,
                 distance, reason, formulation='full', final_mismatch=None):
        self.xi = xi
        self.converged = converged
        self.residual_history = list(residual_history)
        self.mismatch_history = list(mismatch_history)
        self.distance = distance
        self.reason = reason
        self.formulation = formulation
        self.final_mismatch = final_mismatch

    @property
    def iterations(self):
        return len(self.residual_history)

    def as_dict(self):
        """Return the report as a JSON-serializable dictionary

        The tangent vector itself is not included; write it separately.
        """
        return {
            'converged': self.converged,
            'iterations': self.iterations,
            'distance': self.distance,
            'residual_history': [float(x) for x in self.residual_history],
            'mismatch_history': [float(x) for x in self.mismatch_history],
            'reason': self.reason,
            'formulation': self.formulation,
            'final_mismatch': self.final_mismatch,
        }

    def __repr__(self):
        return ('ShootingReport(converged={}, iterations={}, reason={!r})'
                .format(self.converged, self.iterations, self.reason))
