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

"""Run named checks over a grid of stability indices."""

import logging
import math

import config
from src import utiles
from src.checks import deterministic, montecarlo
from src.checks.report import CheckReport
from src.errors import DomainError, NumericalFailure, UsageError

logger = logging.getLogger(__name__)

# check name -> (function, takes a seed)
CHECKS = {
    'cm': (deterministic.check_cm, False),
    'mlf_negative_cm': (deterministic.check_mlf_negative_cm, False),
    'mu_concentration': (deterministic.check_mu_concentration, False),
    'laplace_identities': (deterministic.check_laplace_identities, False),
    'corollary4': (deterministic.check_corollary4, False),
    'tail_constant': (deterministic.check_tail_constant, False),
    'small_time': (deterministic.check_small_time, False),
    'convex': (deterministic.check_convex_decomposition, False),
    'thm3': (montecarlo.check_thm3, True),
    'corollary5': (montecarlo.check_corollary5, True),
    'wh_survival_mc': (montecarlo.check_wh_survival_mc, True),
    'sampler_gates': (montecarlo.check_sampler_gates, True),
    'mittag_leffler_sup': (montecarlo.check_mittag_leffler_sup, True),
}

MONTE_CARLO = {name for name, (_, seeded) in CHECKS.items() if seeded}

# checks with a main threshold that can be overridden
TOLERANT = set(CHECKS) - {'mlf_negative_cm', 'mu_concentration', 'sampler_gates', 'corollary5'}

# the parameter taking the --steps flag
STEP_PARAMS = {
    'thm3': 'grid_steps',
    'wh_survival_mc': 'steps_per_unit',
    'mittag_leffler_sup': 'n_steps',
}


def _normalize(names):
    """Accept a list of check names or a mapping of names to their parameters."""
    if isinstance(names, str):
        names = [names]
    if isinstance(names, dict):
        selected = {name: dict(params or {}) for name, params in names.items()}
    else:
        selected = {name: {} for name in names}
    unknown = [name for name in selected if name not in CHECKS]
    if unknown:
        raise UsageError("Unknown checks: %s (known: %s)", ", ".join(unknown), ", ".join(CHECKS))
    return selected


def suite_checks(suite_name):
    """The checks and parameters of a suite declared in suites.yaml."""
    try:
        return config.suites[suite_name]['checks']
    except KeyError:
        raise UsageError("Unknown suite %r (known: %s)", suite_name, ", ".join(config.suites))


def run_check(name, alpha, params, seed=None, workers=None):
    """Run one check; any error it raises gives a failed report."""
    func, seeded = CHECKS[name]
    kwargs = dict(params)
    if seeded:
        kwargs.update(seed=seed, workers=workers)
    try:
        return func(alpha, **kwargs)
    except (NumericalFailure, DomainError) as err:
        logger.warning("Check %s at α=%g could not be computed: %s", name, alpha, err)
        details = {'error': str(err), 'params': params}
    except Exception as err:
        logger.exception("Check %s at α=%g crashed", name, alpha)
        details = {'error': "%s: %s" % (err.__class__.__name__, err), 'params': params}

    if seeded:
        details['seed'] = seed
    return CheckReport(name, alpha, math.inf, 0.0, details)


def run_suite(names, index_list=None, seed=None, tol_overrides=None, workers=None):
    """Run the named checks at every α of index_list; reports in (check, α) order.

    `names` is a list of check names or a mapping of check names to their parameters.
    tol_overrides maps check names to the tolerance they run with.
    """
    selected = _normalize(names)
    if index_list is None:
        index_list = config.ALPHA_GRID
    if seed is None:
        seed = config.DEFAULT_SEED
    if workers is None:
        workers = config.WORKERS
    for name, tol in (tol_overrides or {}).items():
        if name not in selected:
            raise UsageError("Tolerance given for check %r, which is not selected", name)
        if name not in TOLERANT:
            raise UsageError("Check %r has no tolerance to override", name)
        selected[name]['tol'] = tol

    payloads = [(name, float(alpha), params)
                for name, params in selected.items() for alpha in index_list]
    logger.info("Running %d checks over α in %s (seed %d)", len(payloads), index_list, seed)

    def process(payload):
        name, alpha, params = payload
        # each unit runs single threaded, the fan out happens here
        return run_check(name, alpha, params, seed=seed, workers=1)

    reports = []
    results = utiles.pooled_exec(process, payloads, workers)
    for (name, alpha, params), (ok, result) in zip(payloads, results):
        if not ok:
            result = CheckReport(name, alpha, math.inf, 0.0,
                                 {'error': repr(result), 'params': params, 'seed': seed})
        logger.info("Check %-20s α=%-5g %s (statistic %.4g, threshold %.4g)", name, alpha,
                    "passed" if result.passed else "FAILED", result.statistic, result.threshold)
        reports.append(result)
    return reports
