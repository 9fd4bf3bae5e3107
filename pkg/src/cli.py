# Copyright 2024-2026 MLStable developers (see AUTHORS.txt)
#
# This program is free software: you can redistribute it and/or modify it
# under the terms of the GNU General Public License version 3, as published
# by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranties of
# MERCHANTABILITY, SATISFACTORY QUALITY, or FITNESS FOR A PARTICULAR
# PURPOSE.  See the GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License along
# with this program.  If not, see <http://www.gnu.org/licenses/>.
#
# For further info, check README.md

"""Command line front end: parse, run one verb and emit a table.

Data goes to stdout (or --out), diagnostics to the logging handlers. Exit codes: 0 ok,
1 some check failed, 2 usage or domain error, 3 numerical failure.
"""

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

import config
from src.checks import suite
from src.errors import DomainError, NumericalFailure, UsageError
from src.laws import densities, samplers
from src.numerics import mlf_core, quadrature
from src.numerics.mlf_core import DIRECT, EvalResult, as_index

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

VERBS = ('eval', 'density', 'sample', 'check', 'table')

# numbers in CSV keep 17 significant digits
FLOAT_FORMAT = "%.16e"


@dataclass(frozen=True)
class Command:
    """One verb and its parsed options."""
    verb: str
    options: argparse.Namespace

    def __post_init__(self):
        if self.verb not in VERBS:
            raise UsageError("Unknown verb %r (known: %s)", self.verb, ", ".join(VERBS))


@dataclass
class OutputRecord:
    """A row of named columns; numeric columns first, provenance after."""
    values: Dict[str, Any] = field(default_factory=dict)

    @property
    def fields(self):
        return list(self.values)


@dataclass(frozen=True)
class GridSpec:
    """Points start..stop, `count` of them, linearly or logarithmically spaced."""
    start: float
    stop: float
    count: int
    spacing: str = 'lin'

    def __post_init__(self):
        if self.count < 1:
            raise UsageError("Grid needs at least one point, got %r", self.count)
        if self.spacing not in ('lin', 'log'):
            raise UsageError("Grid spacing must be 'lin' or 'log', got %r", self.spacing)
        if self.spacing == 'log' and not (self.start > 0 and self.stop > 0):
            raise UsageError("A log grid needs positive ends, got %r:%r", self.start, self.stop)

    @classmethod
    def parse(cls, text):
        """Build from 'start:stop:count[:lin|log]'."""
        parts = text.split(':')
        if len(parts) not in (3, 4):
            raise UsageError("Grid must be start:stop:count[:lin|log], got %r", text)
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError("Grid must be start:stop:count[:lin|log], got %r", text)
        spacing = parts[3] if len(parts) == 4 else 'lin'
        return cls(start, stop, count, spacing)

    def points(self):
        if self.spacing == 'log':
            return np.geomspace(self.start, self.stop, self.count).tolist()
        return np.linspace(self.start, self.stop, self.count).tolist()


def _closed(value):
    return EvalResult(value, quadrature.EPS * abs(value), DIRECT, 1)


_D_METHODS = {None: None, 'series': mlf_core.SERIES, 'bernstein': mlf_core.BERNSTEIN}


def _eval_D(alpha, x, opts):
    if opts.method not in _D_METHODS:
        raise UsageError("Method for D must be 'series' or 'bernstein', got %r", opts.method)
    return mlf_core.eval_D(as_index(alpha, widened=True), x, tol=opts.tol,
                           method=_D_METHODS[opts.method])


def _need(opts, name):
    value = getattr(opts, name)
    if value is None:
        raise UsageError("This computation needs --%s", name)
    return value


# name -> f(alpha, point, options) giving an EvalResult; alpha is the order for E_a
FUNCTIONS = {
    'mlf': lambda a, x, o: mlf_core.eval_mlf(a, x, tol=o.tol),
    'mlf_derivative': lambda a, x, o: mlf_core.eval_mlf_derivative(a, x, tol=o.tol),
    'D': _eval_D,
    'D4': lambda a, x, o: _closed(mlf_core.eval_D4_golden(x)),
    'F': lambda a, x, o: mlf_core.eval_F(a, x, tol=o.tol),
    'mu': lambda a, x, o: _closed(mlf_core.mu_density(a, x)),
    'signed_bernstein': lambda a, x, o: _closed(
        mlf_core.signed_bernstein_density_small_alpha(a, x)),
    'neg_bernstein': lambda a, x, o: _closed(mlf_core.mlf_neg_bernstein_density(a, x)),
    'neg_power_bernstein': lambda a, x, o: _closed(
        mlf_core.mlf_neg_power_bernstein_density(a, x)),
    'survival_S_tau': lambda a, x, o: densities.survival_S_tau(
        densities.SurvivalQuery(_need(o, 'q'), x, as_index(a))),
    'wh_laplace': lambda a, x, o: _closed(densities.wh_laplace_S_tau(a, _need(o, 'q'), x)),
    'survival_laplace': lambda a, x, o: _closed(
        densities.survival_laplace_closed_form(a, _need(o, 'q'), x)),
    'laplace_T1': lambda a, x, o: mlf_core.from_quad(
        densities.laplace_T1_product(a, x, tol=o.tol), mlf_core.PRODUCT),
    'cdf_T': lambda a, x, o: _closed(densities.cdf_T(a, x)),
    'sf_T': lambda a, x, o: _closed(densities.sf_T(a, x)),
    'cdf_That1': lambda a, x, o: densities.cdf_That1(a, x),
    'sf_That1': lambda a, x, o: densities.sf_That1(a, x),
    'cdf_T1': lambda a, x, o: densities.cdf_T1(a, x, method=o.method or 'product'),
    'sf_T1': lambda a, x, o: densities.sf_T1(a, x, method=o.method or 'product'),
    'cdf_S1': lambda a, x, o: densities.cdf_S1(a, x),
}

# --method values for densities
_DENSITY_METHODS = {
    None: None, 'series': mlf_core.SERIES, 'product': mlf_core.PRODUCT,
    'convex': mlf_core.CONVEX, 'pollard': mlf_core.POLLARD, 'integral': mlf_core.POLLARD,
    'zolotarev': mlf_core.ZOLOTAREV, 'transform': densities.TRANSFORM,
    'closed_form': densities.CLOSED_FORM,
}


def _grid_sampler(which):
    def draw(index, n, rng, opts):
        grid = samplers.PathGridSpec(1.0, opts.steps)
        return samplers.simulate_supremum(index, grid, rng, which=which, size=n)
    return draw


# name -> f(index, n, rng, options) giving an array of n draws
SAMPLERS = {
    'positive_stable': lambda i, n, r, o: samplers.sample_positive_stable(i.beta, r, size=n),
    'T': lambda i, n, r, o: samplers.sample_T(i, r, size=n),
    'Tbar': lambda i, n, r, o: samplers.sample_Tbar(i, r, size=n),
    'Ttilde': lambda i, n, r, o: samplers.sample_Ttilde(i, r, size=n),
    'T1_product': lambda i, n, r, o: samplers.sample_product_T_That1(i, n, r).values,
    'X1': lambda i, n, r, o: samplers.sample_X1(i, r, size=n),
    'X1_negative': lambda i, n, r, o: samplers.sample_X1_conditioned_negative(i, r, size=n),
    'S1_via_T': lambda i, n, r, o: samplers.sample_S1_via_T(i, n, r).values,
    'sup_X': _grid_sampler('X'),
    'sup_Xhat': _grid_sampler('Xhat'),
    'sup_exp_time': lambda i, n, r, o: samplers.sample_sup_at_exp_time(
        i, _need(o, 'q'), 1.0 / o.steps, r, size=n),
    'T1_grid': lambda i, n, r, o: samplers.estimate_T1_samples(
        i, samplers.PathGridSpec(1.0, o.steps), n, r).values,
}


def _points(opts):
    """Evaluation points from --x/--t (repeatable) or --grid."""
    points = list(opts.x or [])
    if opts.grid is not None:
        points.extend(GridSpec.parse(opts.grid).points())
    if not points:
        raise UsageError("Give evaluation points with --x/--t or --grid")
    return points


def _alphas(opts, default=None):
    if not opts.alpha:
        if default is None:
            raise UsageError("Give at least one --alpha")
        return default
    return opts.alpha


def _result_record(alpha, column, point, result):
    return OutputRecord({
        'alpha': alpha, column: point, 'value': float(result.value),
        'abs_err': float(result.abs_err), 'method': result.method,
    })


def run_eval(opts):
    if opts.fn not in FUNCTIONS:
        raise UsageError("Unknown function %r (known: %s)", opts.fn, ", ".join(FUNCTIONS))
    func = FUNCTIONS[opts.fn]
    alphas = _alphas(opts, [4.0] if opts.fn == 'D4' else None)
    return [_result_record(alpha, 'x', x, func(alpha, x, opts))
            for alpha in alphas for x in _points(opts)]


def run_density(opts):
    if opts.method not in _DENSITY_METHODS:
        raise UsageError("Unknown method %r (known: %s)", opts.method,
                         ", ".join(m for m in _DENSITY_METHODS if m))
    records = []
    for alpha in _alphas(opts):
        spec = densities.DensitySpec(opts.name, alpha, _DENSITY_METHODS[opts.method])
        for t in _points(opts):
            records.append(_result_record(alpha, 't', t, densities.evaluate_density(spec, t)))
    return records


def run_table(opts):
    if opts.grid is None:
        raise UsageError("The table verb needs --grid")
    if opts.fn is not None:
        return run_eval(opts)
    if opts.name is not None:
        return run_density(opts)
    raise UsageError("The table verb needs --fn or --name")


def run_sample(opts):
    if opts.name not in SAMPLERS:
        raise UsageError("Unknown sampler %r (known: %s)", opts.name, ", ".join(SAMPLERS))
    draw = SAMPLERS[opts.name]
    records = []
    for alpha in _alphas(opts):
        index = mlf_core.interior_index(alpha)
        rng = samplers.RandomStream(opts.seed)
        values = samplers.draw_parallel(
            lambda count, stream: draw(index, count, stream, opts), opts.n, rng, opts.workers)
        batch = samplers.SampleBatch(values, index.alpha, opts.name, rng.seed, opts.n,
                                     rng.stream_id)
        for i, value in enumerate(batch.values):
            row = {'i': i, 'value': float(value)}
            row.update(batch.meta)
            records.append(OutputRecord(row))
    return records


def _check_params(opts):
    if opts.suite is not None and opts.check:
        raise UsageError("Give either --suite or --check, not both")
    if opts.check:
        selected = {name: {} for name in opts.check}
    else:
        selected = {name: dict(params or {})
                    for name, params in suite.suite_checks(opts.suite or 'all').items()}
    for name, params in selected.items():
        if opts.paths is not None and name in suite.MONTE_CARLO:
            params['n'] = opts.paths
        if opts.steps is not None and name in suite.STEP_PARAMS:
            params[suite.STEP_PARAMS[name]] = opts.steps
    return selected


def run_check(opts):
    selected = _check_params(opts)
    tol_overrides = None
    if opts.tol is not None:
        tol_overrides = {name: opts.tol for name in selected if name in suite.TOLERANT}
    reports = suite.run_suite(selected, _alphas(opts, config.ALPHA_GRID), seed=opts.seed,
                              tol_overrides=tol_overrides, workers=opts.workers)
    return [OutputRecord(report.as_row()) for report in reports], all(r.passed for r in reports)


def _format(value):
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return str(value)


def emit_table(records, fmt, stream):
    """Write the records as CSV (header always) or as a JSON array of objects."""
    if fmt == 'json':
        rows = [r.values for r in records]
        stream.write(json.dumps(rows, indent=1, allow_nan=True) + "\n")
        return
    if fmt != 'csv':
        raise UsageError("Unknown format %r (known: csv, json)", fmt)
    fields = records[0].fields if records else []
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(fields)
    for record in records:
        writer.writerow([_format(record.values[name]) for name in fields])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mlstable", description="Mittag-Leffler functions and first passages of "
        "spectrally positive stable processes")
    parser.add_argument('-v', '--verbose', action='store_true',
                        help="Show debug information and progress bars.")
    parser.add_argument('--log-file', help="Also log (debug level) to this file.")
    subparsers = parser.add_subparsers(dest='verb', required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--alpha', type=float, action='append',
                        help="Stability index (order for E_a); can be repeated.")
    common.add_argument('--format', default='csv', choices=('csv', 'json'),
                        help="Output format (default csv).")
    common.add_argument('--out', help="Write the table to this file instead of stdout.")
    common.add_argument('--seed', type=int, default=config.DEFAULT_SEED,
                        help="Seed of the random streams.")
    common.add_argument('--workers', type=int, default=config.WORKERS,
                        help="Amount of parallel workers.")
    common.add_argument('--tol', type=float, help="Tolerance of the evaluation or checks.")
    common.add_argument('--method', help="Force a representation.")
    common.add_argument('--q', type=float, help="Rate of the exponential clock.")
    common.add_argument('--steps', type=int, help="Grid steps (per time unit).")

    points = argparse.ArgumentParser(add_help=False)
    points.add_argument('--x', '--t', '--lambda', dest='x', type=float, action='append',
                        help="Evaluation point; can be repeated.")
    points.add_argument('--grid', help="Evaluation grid start:stop:count[:lin|log].")

    sub = subparsers.add_parser('eval', parents=[common, points], help="Evaluate a function.")
    sub.add_argument('--fn', required=True, help="One of: %s." % ", ".join(FUNCTIONS))

    sub = subparsers.add_parser('density', parents=[common, points], help="Evaluate a density.")
    sub.add_argument('--name', required=True, help="One of: %s." % ", ".join(
        ('T', 'Tbar', 'Ttilde', 'That1', 'g_That1', 'h_That1', 'T1', 'S1')))

    sub = subparsers.add_parser('table', parents=[common, points],
                                help="Tabulate a function or density on a grid.")
    sub.add_argument('--fn', help="A function, as in eval.")
    sub.add_argument('--name', help="A density, as in density.")

    sub = subparsers.add_parser('sample', parents=[common], help="Draw samples.")
    sub.add_argument('--name', required=True, help="One of: %s." % ", ".join(SAMPLERS))
    sub.add_argument('--n', '--paths', dest='n', type=int, default=1000,
                     help="Amount of draws (paths for path samplers).")

    sub = subparsers.add_parser('check', parents=[common], help="Run checks.")
    sub.add_argument('--suite', help="A suite of suites.yaml (default all).")
    sub.add_argument('--check', action='append', help="A single check; can be repeated.")
    sub.add_argument('--paths', '--n', dest='paths', type=int,
                     help="Sample size of the Monte Carlo checks.")
    return parser


def _validate(opts):
    if opts.workers < 1:
        raise UsageError("--workers must be at least 1, got %r", opts.workers)
    if opts.steps is not None and opts.steps < 1:
        raise UsageError("--steps must be at least 1, got %r", opts.steps)
    if opts.verb == 'sample':
        if opts.n < 1:
            raise UsageError("--n must be at least 1, got %r", opts.n)
        if opts.steps is None:
            opts.steps = 1024
    for alpha in opts.alpha or []:
        if not math.isfinite(alpha):
            raise UsageError("--alpha must be finite, got %r", alpha)


_RUNNERS = {
    'eval': run_eval,
    'density': run_density,
    'table': run_table,
    'sample': run_sample,
}


def dispatch(argv, configure_logging=None):
    """Parse argv, run the verb and write its table; return the exit code.

    configure_logging, if given, is called with the parsed options before any work.
    """
    parser = build_parser()
    try:
        opts = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if configure_logging is not None:
        configure_logging(opts)

    # config overrides, at init time
    config.VERBOSE = opts.verbose
    config.WORKERS = opts.workers

    passed = True
    try:
        command = Command(opts.verb, opts)
        _validate(opts)
        if command.verb == 'check':
            records, passed = run_check(opts)
        else:
            records = _RUNNERS[command.verb](opts)
        buffer = io.StringIO()
        emit_table(records, opts.format, buffer)
    except (UsageError, DomainError) as err:
        logger.error("%s", err)
        return EXIT_USAGE
    except NumericalFailure as err:
        logger.error("Numerical failure: %s (best estimate %r)", err, err.partial)
        return EXIT_NUMERICAL
    except Exception:
        logger.exception("Unexpected crash running %r", opts.verb)
        return EXIT_NUMERICAL

    if opts.out:
        try:
            with open(opts.out, "wt", encoding="utf-8", newline="") as fh:
                fh.write(buffer.getvalue())
        except OSError as err:
            logger.error("Could not write %r: %s", opts.out, err)
            return EXIT_USAGE
    else:
        sys.stdout.write(buffer.getvalue())
        sys.stdout.flush()
    return EXIT_OK if passed else EXIT_CHECK_FAILED
