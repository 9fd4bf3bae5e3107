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

import os

import yaml

# MLStable version
VERSION = '1.0.0'

# Default absolute tolerance for function evaluation (series, closed forms)
EVAL_TOL = 1e-10

# Default absolute tolerance for semi-infinite quadrature
QUAD_TOL = 1e-8

# Hard cap of terms for any series summation
MAX_TERMS = 10000

# Maximum amount of panels for an adaptive quadrature
MAX_SUBDIVISIONS = 2 ** 14

# Consecutive negligible terms needed to stop a series (some terms vanish exactly
# at the poles of 1/Γ, so one small term is not enough)
SERIES_QUIET_TERMS = 3

# A series whose max partial sum exceeds the result by this ratio is ill conditioned
CANCELLATION_LIMIT = 1e8

# Series representations of densities are trusted only below this cancellation ratio
SERIES_WELL_CONDITIONED = 1e4

# E_a(-x) with a < 1 skips its series once x^(1/a) goes past this (the terms grow like
# exp(x^(1/a)) before cancelling)
MLF_SERIES_REACH = 12.0

# D_α: series difference below this point, Bernstein quadrature above
D_SWITCH = 5.0

# window where both representations of D_α are computed and compared by the tests
D_OVERLAP = (2.0, 8.0)

# Pollard's integral for the T̂_1 density is used only when its integrand grows less
# than this (log scale) before the exponential damping wins
POLLARD_MAX_GROWTH = 5.0

# Points of the inverse CDF tables of T, T̄ and T̃, and the quantiles they cover
CDF_TABLE_POINTS = 2048
CDF_TABLE_COVERAGE = 1e-6

# Nodes (per decade) and range of the monotone table of the T_1 CDF
T1_TABLE_PER_DECADE = 8
T1_TABLE_RANGE = (1e-4, 1e8)

# Attempts per draw when rejecting X_1 ≥ 0
REJECTION_BUDGET = 10000

# Asymptotic KS critical constants: c(0.05) and c(0.01)
KS_C05 = 1.36
KS_C01 = 1.63

# Default seed when none is given
DEFAULT_SEED = 42

# Grid of stability indices used by suites when none is given
ALPHA_GRID = [1.2, 1.5, 1.8]

# Probes for the tail constant and the small time behaviour of T_1
TAIL_PROBES = [1e2, 1e3, 1e4]
SMALL_TIME_PROBES = [1e-1, 1e-2, 1e-3, 1e-4]

# Relative tolerances of the asymptotic checks
TAIL_REL_TOL = 0.01
SMALL_TIME_REL_TOL = 0.02

# Monte Carlo checks accept max(MC_REL_TOL, 3 stderr)
MC_REL_TOL = 0.02

# Amount of workers for suites and Monte Carlo fan out
WORKERS = 1

# Verbose progress (set at init time by the CLI)
VERBOSE = False

# load the suites of checks and validate them
_path = os.path.join(os.path.dirname(__file__), "suites.yaml")
with open(_path, "rt", encoding="utf-8") as fh:
    suites = yaml.safe_load(fh)

KNOWN_CHECKS = [
    'cm', 'mlf_negative_cm', 'mu_concentration', 'laplace_identities', 'thm3',
    'corollary4', 'corollary5', 'tail_constant', 'small_time', 'convex',
    'wh_survival_mc', 'sampler_gates', 'mittag_leffler_sup',
]
for _suite_name, _suite in suites.items():
    if not _suite or not _suite.get('checks'):
        raise ValueError("Suite %r has no checks" % (_suite_name,))
    for _check_name in _suite['checks']:
        if _check_name not in KNOWN_CHECKS:
            raise ValueError("Unknown check %r in suite %r" % (_check_name, _suite_name))
