"""
Numerical experiments: convergence tables of single shooting, diagnostics
of the Jacobians and the LFMS convergence demo. Every experiment returns
rows ready to be written as CSV.
"""
import csv
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from stiefel.frechet import StructuredA
from stiefel.frechet.jacobian import jacobian_exp
from stiefel.humanize import format_pi_multiple
from stiefel.manifold import InvalidArgumentError, StiefelPoint
from stiefel.manifold.core import random_tangent, decompose_tangent, \
    injectivity_radius_bound
from stiefel.manifold.geodesic import stiefel_exp
from stiefel.shooting import ShootingConfig
from stiefel.shooting.leapfrog import LFMSConfig, lfms
from stiefel.shooting.single import stiefel_log, jacobian_diagnostics

logger = logging.getLogger('Experiments')

THREADS_VARIABLE = 'STIEFEL_SHOOT_THREADS'

TABLE1_DISTANCES = [f * math.pi for f in
                    (0.85, 0.875, 0.9, 0.925, 0.95, 0.975, 1.0)]
TABLE2_DISTANCE = 0.75 * math.pi
# St(12, 3) pair at 0.95pi on which single shooting does not converge
DEMO_SEED = 1

TABLE_COLUMNS = ('n', 'p', 'd', 'converged_fraction', 'mean_iterations',
                 'mean_time', 'residual', 'mismatch', 'inside_bound')
SINC_COLUMNS = ('alpha', 'sigma_min', 'abs_sinc', 'abs_diff')
RANK_COLUMNS = ('n', 'd', 'rank', 'condition')
TIMING_COLUMNS = ('mean_time',)


class ExperimentSpec:
    """
    Description of a single run of the command line tool

    :ivar str kind: one of :attr:`KINDS`
    :ivar int n: number of rows of the points
    :ivar list[int] ps: numbers of columns
    :ivar list[float] distances: distance (or alpha) grid
    :ivar list[int] seeds: seeds of the random instances
    :ivar int repeat: timing repetitions per instance
    :ivar int|None m: number of junctions (LFMS demo)
    """
    KINDS = ('log', 'exp', 'distance', 'table1', 'table2', 'scaling',
             'sinc-law', 'rank-sweep', 'lfms-demo', 'karcher',
             'shape-geodesic', 'interp')

    def __init__(self, kind, n=15, ps=None, distances=None, seeds=None,
                 repeat=1, m=None, ns=None):
        self.kind = kind
        self.n = n
        self.ps = list(ps) if ps is not None else []
        self.distances = list(distances) if distances is not None else []
        self.seeds = list(seeds) if seeds is not None else [0]
        self.repeat = repeat
        self.m = m
        self.ns = list(ns) if ns is not None else []

    def validate(self):
        """Check the values before dispatch

        :raise InvalidArgumentError: on an unknown kind or invalid values
        """
        if self.kind not in self.KINDS:
            raise InvalidArgumentError('Unknown experiment kind {!r}'
                                       .format(self.kind))
        if self.n < 1:
            raise InvalidArgumentError('n must be positive, got {}'
                                       .format(self.n))
        for p in self.ps:
            if not 1 <= p <= self.n:
                raise InvalidArgumentError('Invalid p = {} for n = {}'
                                           .format(p, self.n))
        if any(d < 0 or not math.isfinite(d) for d in self.distances):
            raise InvalidArgumentError('Distances must be finite and '
                                       'nonnegative')
        if not self.seeds:
            raise InvalidArgumentError('At least one seed is needed')
        if self.repeat < 1:
            raise InvalidArgumentError('repeat must be at least 1, got {}'
                                       .format(self.repeat))
        if self.m is not None and self.m < 3:
            raise InvalidArgumentError('m must be at least 3, got {}'
                                       .format(self.m))
        if any(n < 2 for n in self.ns):
            raise InvalidArgumentError('Sphere dimensions need n >= 2')
        return self

    def __repr__(self):
        return 'ExperimentSpec(kind={!r}, n={})'.format(self.kind, self.n)


def endpoint_pair(n, p, d, seed):
    """Endpoints ``X = [I_p; 0]`` and ``Y = Exp_X(eta)`` with
    ``||eta||_c = d`` in a random direction

    :param int n: number of rows
    :param int p: number of columns
    :param float d: canonical norm of eta
    :param int seed: seed of the direction
    :return: ``(X, Y, eta)``
    """
    start = StiefelPoint(np.eye(n, p))
    eta = random_tangent(start, d, seed)
    return start, stiefel_exp(start, eta).point, eta


def thread_count():
    """Size of the thread pool of the sweeps

    Capped by the ``STIEFEL_SHOOT_THREADS`` environment variable.
    """
    default = os.cpu_count() or 1
    value = os.environ.get(THREADS_VARIABLE)
    if not value:
        return default
    try:
        count = int(value)
    except ValueError:
        count = 0
    if count < 1:
        logger.warning('Ignoring invalid {}={!r}'.format(THREADS_VARIABLE,
                                                         value))
        return default
    return min(count, default)


def run_cells(function, cells):
    """Evaluate ``function(*cell)`` for every cell in a thread pool

    Results keep the order of ``cells``. A cell raising an exception is
    logged and yields None.
    """
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        futures = [pool.submit(function, *cell) for cell in cells]
        results = []
        for cell, future in zip(cells, futures):
            try:
                results.append(future.result())
            except Exception:
                logger.critical('Experiment cell {} failed'.format(cell),
                                exc_info=True)
                results.append(None)
    return results


def _shoot_cell(n, p, d, seed, config, repeat):
    start, end, _ = endpoint_pair(n, p, d, seed)
    times = []
    report = None
    for _ in range(repeat):
        begin = time.perf_counter()
        report = stiefel_log(start, end, config)
        times.append(time.perf_counter() - begin)
    return report, float(np.median(times))


def _summarize(n, p, d, results):
    results = [r for r in results if r is not None]
    reports = [report for report, _ in results]
    converged = [report for report in reports if report.converged]
    row = {
        'n': n,
        'p': p,
        'd': format_pi_multiple(d),
        'converged_fraction': len(converged) / len(reports) if reports
        else 0.0,
        'mean_iterations': float(np.mean([r.iterations for r in reports]))
        if reports else None,
        'mean_time': float(np.mean([t for _, t in results])) if results
        else None,
        'residual': max(r.residual_history[-1] for r in converged)
        if converged else None,
        'mismatch': max(r.final_mismatch for r in converged)
        if converged else None,
        'inside_bound': d < injectivity_radius_bound(),
    }
    return row


def shooting_table(n, ps, distances, seeds, config=None, repeat=1):
    """Single shooting statistics for every (p, d) cell over the seeds

    :param int n: number of rows
    :param list[int] ps: numbers of columns
    :param list[float] distances: distances of the endpoints
    :param list[int] seeds: seeds of the random directions
    :param ShootingConfig|None config: settings
    :param int repeat: timing repetitions per instance
    :return: rows with :data:`TABLE_COLUMNS`
    :rtype: list[dict]
    """
    if config is None:
        config = ShootingConfig()
    keys = [(p, d) for p in ps for d in distances]
    cells = [(n, p, d, seed, config, repeat)
             for p, d in keys for seed in seeds]
    results = run_cells(_shoot_cell, cells)
    rows = []
    for i, (p, d) in enumerate(keys):
        chunk = results[i * len(seeds):(i + 1) * len(seeds)]
        rows.append(_summarize(n, p, d, chunk))
        logger.info('St({}, {}) at d = {}: {:.0%} converged'.format(
            n, p, rows[-1]['d'], rows[-1]['converged_fraction']))
    return rows


def table1(n=15, ps=None, distances=None, seeds=range(10), config=None):
    """Convergence of single shooting near the injectivity radius"""
    if ps is None:
        ps = range(1, n + 1)
    if distances is None:
        distances = TABLE1_DISTANCES
    return shooting_table(n, list(ps), list(distances), list(seeds), config)


def table2(n=15, ps=None, d=TABLE2_DISTANCE, seeds=(0,), config=None,
           repeat=1):
    """Iterations, time and final residuals at a fixed distance"""
    if ps is None:
        ps = range(1, n + 1)
    return shooting_table(n, list(ps), [d], list(seeds), config, repeat)


def scaling(n=60, ps=(2, 4, 6, 8, 10), d=TABLE2_DISTANCE, seeds=(0,),
            config=None, repeat=1):
    """Cost of single shooting as p grows for a larger n"""
    return shooting_table(n, list(ps), [d], list(seeds), config, repeat)


def _sinc_cell(n, p, alpha, seed):
    start = StiefelPoint(np.eye(n, p))
    coords = decompose_tangent(random_tangent(start, 1.0, seed))
    a = StructuredA.from_coordinates(coords).matrix
    a = a * (alpha / np.linalg.norm(a, 2)) if alpha > 0 else 0 * a
    sigma_min = float(jacobian_exp(a).singular_values()[-1])
    abs_sinc = abs(float(np.sinc(alpha / math.pi)))
    return {'alpha': alpha, 'sigma_min': sigma_min, 'abs_sinc': abs_sinc,
            'abs_diff': abs(sigma_min - abs_sinc)}


def sinc_law(alphas, n=6, p=1, seed=0):
    """Smallest singular value of the Jacobian of exp against ``|sinc a|``

    A random structured A is rescaled to spectral norm alpha for every
    grid value.

    :return: rows with :data:`SINC_COLUMNS`
    """
    return run_cells(_sinc_cell, [(n, p, alpha, seed) for alpha in alphas])


def _rank_cell(n, p, d, seed):
    start = StiefelPoint(np.eye(n, p))
    rank, condition = jacobian_diagnostics(start,
                                           random_tangent(start, d, seed))
    return {'n': n, 'd': format_pi_multiple(d), 'rank': rank,
            'condition': condition}


def rank_sweep(ns, distances, p=1, seed=0):
    """Numerical rank and condition of the shooting Jacobian over a grid

    :return: rows with :data:`RANK_COLUMNS`
    """
    return run_cells(_rank_cell, [(n, p, d, seed)
                                  for n in ns for d in distances])


def lfms_demo(n=12, p=3, d=0.95 * math.pi, m=4, seed=DEMO_SEED,
              config=None):
    """LFMS on a pair single shooting cannot handle

    Single shooting fails on the default pair, after which leapfrog starts
    with m junctions. Pass a config with ``force_leapfrog`` to skip the
    single shooting attempt on other pairs.

    :return: ``(report, eta)``, eta being the generating tangent vector
    :rtype: (stiefel.shooting.multiple.MSReport, TangentVector)
    """
    if config is None:
        config = LFMSConfig(lf_initial_m=m, lf_max_m=max(m, 16))
    start, end, eta = endpoint_pair(n, p, d, seed)
    report = lfms(start, end, config)
    if report.converged:
        logger.info('LFMS ({}) recovered distance {:.15g} for d = {}'.format(
            report.path, report.distance, format_pi_multiple(d)))
    return report, eta


def _format(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return '{:.6g}'.format(value)
    return str(value)


def write_rows(f, rows, columns, timing=True):
    """Write experiment rows as CSV

    :param f: open text file
    :param list[dict] rows: rows; None entries (failed cells) are skipped
    :param columns: column names
    :param bool timing: whether to keep the wall-clock columns
    """
    if not timing:
        columns = [c for c in columns if c not in TIMING_COLUMNS]
    writer = csv.writer(f, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        if row is None:
            continue
        writer.writerow([_format(row.get(c)) for c in columns])
