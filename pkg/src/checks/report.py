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

"""Reports of the checks and the statistics shared by them."""

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np
from scipy import stats

import config
from src.errors import ContractError, DomainError


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a check: passed if and only if statistic ≤ threshold.

    Thresholds are engineering choices; `details` holds what is needed to reproduce
    the run (grids, tolerances, seeds, sizes, method tags).
    """
    name: str
    alpha: float
    statistic: float
    threshold: float
    details: Dict[str, Any] = field(default_factory=dict)
    passed: bool = field(init=False)

    def __post_init__(self):
        # NaN statistics never pass
        object.__setattr__(self, 'passed', bool(self.statistic <= self.threshold))

    def as_row(self):
        """Flat record for the CLI tables; details as canonical JSON."""
        return {
            'check': self.name,
            'alpha': self.alpha,
            'statistic': self.statistic,
            'threshold': self.threshold,
            'passed': int(self.passed),
            'details': json.dumps(self.details, sort_keys=True, default=_jsonable),
        }


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return repr(obj)


@dataclass(frozen=True)
class TailConstant:
    """κ in P[T_1 ≥ t] ~ κ t^(1/α - 1)."""
    kappa: float
    alpha: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError("Tail constant must be positive, got %r", self.kappa)


def kappa_target(alpha):
    """1 / (Γ(α) Γ(1/α))."""
    return 1.0 / (math.gamma(alpha) * math.gamma(1.0 / alpha))


def ks_threshold(n, level=0.01):
    """Asymptotic KS critical value c(level)/√n, for the 5% and 1% levels."""
    constants = {0.05: config.KS_C05, 0.01: config.KS_C01}
    if level not in constants:
        raise DomainError("KS level must be 0.05 or 0.01, got %r", level)
    return constants[level] / math.sqrt(n)


def ks_statistic(batch, cdf, vectorized=False):
    """Sup distance between the empirical CDF of the batch and `cdf`.

    `batch` is a SampleBatch or a sequence of values; `cdf` maps reals (arrays if
    vectorized) into [0, 1] and must be non decreasing on the sample points.
    """
    values = np.sort(np.asarray(getattr(batch, 'values', batch), dtype=float))
    if not len(values):
        raise ContractError("KS statistic needs a non empty batch")
    if vectorized:
        cdf_values = np.asarray(cdf(values), dtype=float)
    else:
        cdf_values = np.array([float(cdf(x)) for x in values])
    if np.any(cdf_values < 0) or np.any(cdf_values > 1):
        raise ContractError("CDF takes values outside [0, 1]")
    if np.any(np.diff(cdf_values) < -1e-12):
        raise ContractError("CDF is not monotone on the sample points")
    # the values are sorted already, so kstest sees the same order we evaluated
    return float(stats.kstest(values, lambda _: cdf_values).statistic)


def mc_tolerance(target, stderr, rel_tol=None):
    """Monte Carlo acceptance: max(rel_tol relative, 3 standard errors)."""
    if rel_tol is None:
        rel_tol = config.MC_REL_TOL
    return max(rel_tol * abs(target), 3 * stderr)


def mean_and_stderr(values):
    values = np.asarray(values, dtype=float)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(len(values)))
