"""
Command line interface.

Data (JSON reports, CSV matrices and tables) goes to stdout or to the
requested files; diagnostics go to stderr through logging. The exit code is
0 on success, 2 when a computation does not converge and 1 on invalid
input.
"""
import argparse
import contextlib
import csv
import json
import logging
import sys
import time

import numpy as np

from stiefel import experiments
from stiefel.applications.halfdensity import load_pdf, halfdensity_mean
from stiefel.applications.interpolation import BasisFamily, \
    TangentInterpolator, METHODS
from stiefel.applications.karcher import KarcherConfig, karcher_mean
from stiefel.applications.shapes import affine_standardize, \
    load_point_set, shape_geodesic
from stiefel.humanize import parse_pi_literal, parse_pi_list, \
    natural_timedelta
from stiefel.logger import set_up_logging
from stiefel.manifold import ManifoldError, InvalidArgumentError
from stiefel.manifold.geodesic import stiefel_exp
from stiefel.manifold.io import ParseError, load_point, load_tangent, \
    write_matrix
from stiefel.settings import Settings
from stiefel.shooting import ShootingConfig, LogFailedError
from stiefel.shooting.leapfrog import LFMSConfig, lfms
from stiefel.shooting.single import stiefel_log

logger = logging.getLogger('Main')

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NOT_CONVERGED = 2


class ArgumentParser(argparse.ArgumentParser):
    """Parser exiting with the input error code on invalid arguments"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, '{}: error: {}\n'.format(self.prog,
                                                            message))


def _int_list(text):
    try:
        return [int(x) for x in text.split(',') if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            'invalid list of integers: {!r}'.format(text))


def _seeds(text):
    """'5' means seeds 0..4, '1,3,8' lists them"""
    if ',' in text:
        return _int_list(text)
    try:
        return list(range(int(text)))
    except ValueError:
        raise argparse.ArgumentTypeError(
            'invalid number of seeds: {!r}'.format(text))


def _pi_list(text):
    try:
        return parse_pi_list(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            'invalid list of values: {!r}'.format(text))


@contextlib.contextmanager
def _output(path):
    if path is None or path == '-':
        yield sys.stdout
    else:
        with open(path, 'w', newline='') as f:
            yield f


def _write_json(data, path=None):
    with _output(path) as f:
        json.dump(data, f, indent=2)
        f.write('\n')


def _settings(args):
    return Settings(args.config)


def _karcher_config(args):
    settings = _settings(args)
    config = KarcherConfig.from_settings(settings)
    if args.lfms:
        config.lfms = LFMSConfig.from_settings(settings)
    return config


def cmd_log(args):
    start = load_point(args.X)
    end = load_point(args.Y)
    settings = _settings(args)
    report = stiefel_log(start, end, ShootingConfig.from_settings(settings))
    if not report.converged and args.lfms:
        logger.warning('Single shooting failed ({}), trying LFMS'
                       .format(report.reason))
        report = lfms(start, end, LFMSConfig.from_settings(settings))
    if args.tangent is not None and report.xi is not None:
        write_matrix(args.tangent, report.xi.ambient)
    _write_json(report.as_dict(), args.output)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_distance(args):
    start = load_point(args.X)
    end = load_point(args.Y)
    settings = _settings(args)
    report = stiefel_log(start, end, ShootingConfig.from_settings(settings))
    if not report.converged and args.lfms:
        report = lfms(start, end, LFMSConfig.from_settings(settings))
    _write_json({'converged': report.converged, 'distance': report.distance,
                 'reason': report.reason}, args.output)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_exp(args):
    start = load_point(args.X)
    xi = load_tangent(args.xi, start)
    sample = stiefel_exp(start, xi, args.t)
    with _output(args.output) as f:
        write_matrix(f, sample.point.data)
    return EXIT_OK


def _experiment_spec(kind, **kwargs):
    return experiments.ExperimentSpec(kind, **kwargs).validate()


def cmd_table(args):
    spec = _experiment_spec(args.kind, n=args.n, ps=args.p,
                            distances=args.d, seeds=args.seeds,
                            repeat=args.repeat)
    config = ShootingConfig.from_settings(_settings(args))
    ps = spec.ps or None
    if spec.kind == 'table1':
        rows = experiments.table1(spec.n, ps, spec.distances or None,
                                  spec.seeds, config)
    elif spec.kind == 'table2':
        d = spec.distances[0] if spec.distances else \
            experiments.TABLE2_DISTANCE
        rows = experiments.table2(spec.n, ps, d, spec.seeds, config,
                                  spec.repeat)
    else:
        d = spec.distances[0] if spec.distances else \
            experiments.TABLE2_DISTANCE
        rows = experiments.scaling(spec.n, ps or (2, 4, 6, 8, 10), d,
                                   spec.seeds, config, spec.repeat)
    with _output(args.output) as f:
        experiments.write_rows(f, rows, experiments.TABLE_COLUMNS,
                               timing=not args.no_timing)
    return EXIT_OK


def cmd_diagnostics(args):
    if args.kind == 'sinc-law':
        alphas = args.alpha if args.alpha else \
            [round(0.1 * i, 10) for i in range(51)]
        spec = _experiment_spec(args.kind, n=args.n, ps=[args.p],
                                distances=alphas, seeds=[args.seed])
        rows = experiments.sinc_law(spec.distances, spec.n, args.p,
                                    args.seed)
        columns = experiments.SINC_COLUMNS
    else:
        distances = args.d if args.d else \
            [f * np.pi for f in np.linspace(0.5, 1.0, 11)]
        ns = args.ns if args.ns else list(range(2, 9))
        spec = _experiment_spec(args.kind, n=max(ns), ps=[args.p],
                                distances=distances, seeds=[args.seed],
                                ns=ns)
        rows = experiments.rank_sweep(spec.ns, spec.distances, args.p,
                                      args.seed)
        columns = experiments.RANK_COLUMNS
    with _output(args.output) as f:
        experiments.write_rows(f, rows, columns)
    return EXIT_OK


def cmd_lfms_demo(args):
    spec = _experiment_spec('lfms-demo', n=args.n, ps=[args.p],
                            distances=[args.d], seeds=[args.seed], m=args.m)
    settings = _settings(args)
    values = LFMSConfig.settings_values(settings)
    values.update(lf_initial_m=spec.m, lf_max_m=max(spec.m,
                                                    values['lf_max_m']),
                  force_leapfrog=args.force)
    report, _ = experiments.lfms_demo(spec.n, args.p, args.d, spec.m,
                                      args.seed, LFMSConfig(**values))
    with _output(args.output) as f:
        report.trace.write_csv(f)
    if args.report is not None:
        _write_json(report.as_dict(), args.report)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_karcher(args):
    config = _karcher_config(args)
    if args.pdf:
        loaded = [load_pdf(path) for path in args.points]
        grid, _, h = loaded[0]
        if any(g.shape != grid.shape or not np.allclose(g, grid)
               for g, _, _ in loaded):
            raise InvalidArgumentError('Densities are sampled on different '
                                       'grids')
        density = halfdensity_mean([values for _, values, _ in loaded], h,
                                   config)
        with _output(args.output) as f:
            write_matrix(f, np.column_stack([grid, density]))
        return EXIT_OK
    mean = karcher_mean([load_point(path) for path in args.points], config)
    with _output(args.output) as f:
        write_matrix(f, mean.data)
    return EXIT_OK


def cmd_shape_geodesic(args):
    config = _karcher_config(args)
    start = affine_standardize(load_point_set(args.start))
    end = affine_standardize(load_point_set(args.end))
    if start.n != end.n:
        raise InvalidArgumentError('Shapes have {} and {} points'
                                   .format(start.n, end.n))
    shapes = [start] + shape_geodesic(start, end, args.k, config) + [end]
    with _output(args.output) as f:
        writer = csv.writer(f, lineterminator='\n')
        for i, shape in enumerate(shapes):
            for x, y in shape.points:
                writer.writerow([i, '{:.17g}'.format(x), '{:.17g}'.format(y)])
    return EXIT_OK


def cmd_interp(args):
    family = BasisFamily.from_manifest(args.manifest)
    interpolator = TangentInterpolator(family, args.method,
                                       _karcher_config(args))
    with _output(args.output) as f:
        write_matrix(f, interpolator(args.parameter).data)
    return EXIT_OK


def _common(parser):
    parser.add_argument('--config', help='JSON file with settings')
    parser.add_argument('--output', '-o',
                        help='output file (default: stdout)')


def build_parser():
    parser = ArgumentParser(
        prog='stiefel',
        description='Riemannian logarithm and distance on the Stiefel '
                    'manifold')
    parser.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR',
                                 'CRITICAL'])
    parser.add_argument('--log-file', help='also log everything to a file')
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    sub = commands.add_parser('log', help='logarithm of Y at X')
    _common(sub)
    sub.add_argument('--X', required=True, help='CSV file of X')
    sub.add_argument('--Y', required=True, help='CSV file of Y')
    sub.add_argument('--tangent', help='write the tangent vector to CSV')
    sub.add_argument('--lfms', action='store_true',
                     help='fall back to LFMS when single shooting fails')
    sub.set_defaults(handler=cmd_log)

    sub = commands.add_parser('distance', help='canonical distance')
    _common(sub)
    sub.add_argument('--X', required=True, help='CSV file of X')
    sub.add_argument('--Y', required=True, help='CSV file of Y')
    sub.add_argument('--lfms', action='store_true',
                     help='fall back to LFMS when single shooting fails')
    sub.set_defaults(handler=cmd_distance)

    sub = commands.add_parser('exp', help='exponential of xi at X')
    _common(sub)
    sub.add_argument('--X', required=True, help='CSV file of X')
    sub.add_argument('--xi', required=True, help='CSV file of xi')
    sub.add_argument('--t', type=parse_pi_literal, default=1.0,
                     help='curve parameter')
    sub.set_defaults(handler=cmd_exp)

    sub = commands.add_parser('table', help='single shooting tables')
    _common(sub)
    sub.add_argument('--kind', required=True,
                     choices=['table1', 'table2', 'scaling'])
    sub.add_argument('--n', type=int, default=15)
    sub.add_argument('--p', type=_int_list,
                     help='comma-separated values of p')
    sub.add_argument('--d', type=_pi_list,
                     help="comma-separated distances, e.g. '0.9pi'")
    sub.add_argument('--seeds', type=_seeds, default='10',
                     help="number of seeds or comma-separated seeds")
    sub.add_argument('--repeat', type=int, default=1,
                     help='timing repetitions per instance')
    sub.add_argument('--no-timing', action='store_true',
                     help='omit the wall-clock columns')
    sub.set_defaults(handler=cmd_table)

    sub = commands.add_parser('diagnostics', help='Jacobian diagnostics')
    _common(sub)
    sub.add_argument('--kind', required=True,
                     choices=['sinc-law', 'rank-sweep'])
    sub.add_argument('--n', type=int, default=6)
    sub.add_argument('--ns', type=_int_list,
                     help='comma-separated sphere dimensions')
    sub.add_argument('--p', type=int, default=1)
    sub.add_argument('--alpha', type=_pi_list,
                     help='comma-separated norms of A')
    sub.add_argument('--d', type=_pi_list, help='comma-separated distances')
    sub.add_argument('--seed', type=int, default=0)
    sub.set_defaults(handler=cmd_diagnostics)

    sub = commands.add_parser('lfms-demo', help='LFMS convergence trace')
    _common(sub)
    sub.add_argument('--n', type=int, default=12)
    sub.add_argument('--p', type=int, default=3)
    sub.add_argument('--d', type=parse_pi_literal, default='0.95pi')
    sub.add_argument('--m', type=int, default=4)
    sub.add_argument('--seed', type=int, default=experiments.DEMO_SEED)
    sub.add_argument('--force', action='store_true',
                     help='skip the single shooting attempt')
    sub.add_argument('--report', help='write the JSON report to a file')
    sub.set_defaults(handler=cmd_lfms_demo)

    sub = commands.add_parser('karcher', help='Karcher mean')
    _common(sub)
    sub.add_argument('points', nargs='+', help='CSV files of the points')
    sub.add_argument('--pdf', action='store_true',
                     help='inputs are densities (grid, value)')
    sub.add_argument('--lfms', action='store_true',
                     help='fall back to LFMS when single shooting fails')
    sub.set_defaults(handler=cmd_karcher)

    sub = commands.add_parser('shape-geodesic',
                              help='shapes along a geodesic')
    _common(sub)
    sub.add_argument('--start', required=True, help='CSV point set')
    sub.add_argument('--end', required=True, help='CSV point set')
    sub.add_argument('--k', type=int, default=8,
                     help='number of intermediate shapes')
    sub.add_argument('--lfms', action='store_true',
                     help='fall back to LFMS when single shooting fails')
    sub.set_defaults(handler=cmd_shape_geodesic)

    sub = commands.add_parser('interp', help='interpolate a basis family')
    _common(sub)
    sub.add_argument('--manifest', required=True,
                     help='JSON manifest of the bases')
    sub.add_argument('--parameter', type=float, required=True)
    sub.add_argument('--method', choices=METHODS, default='linear')
    sub.add_argument('--lfms', action='store_true',
                     help='fall back to LFMS when single shooting fails')
    sub.set_defaults(handler=cmd_interp)
    return parser


def main(argv=None):
    """Run the command line tool

    :param list[str]|None argv: arguments, ``sys.argv[1:]`` by default
    :return: exit code
    :rtype: int
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    set_up_logging(args.log_level, args.log_file)
    logger.info('Running {} ({} threads at most)'.format(
        args.command, experiments.thread_count()))
    start = time.perf_counter()
    try:
        code = args.handler(args)
    except LogFailedError as e:
        logger.error('{}'.format(e))
        return EXIT_NOT_CONVERGED
    except (ParseError, InvalidArgumentError, OSError) as e:
        logger.error('Invalid input: {}'.format(e))
        return EXIT_INPUT_ERROR
    except ManifoldError as e:
        logger.error('Computation failed: {}'.format(e))
        return EXIT_NOT_CONVERGED
    logger.info('Finished in {}'.format(natural_timedelta(
        time.perf_counter() - start)))
    return code


if __name__ == '__main__':
    sys.exit(main())
