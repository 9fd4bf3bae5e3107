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

"""Random sampling: exact draws of the laws involved and grid simulation of suprema.

All the randomness comes from a RandomStream; every sampler is a pure function of its
parameters and of the stream state. Samplers take an optional `size` and return a
float when it is None, an array otherwise.
"""

import logging
import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy import interpolate

import config
from src import utiles
from src.errors import ContractError, DomainError, NumericalFailure
from src.laws import densities, stable
from src.numerics.mlf_core import interior_index

logger = logging.getLogger(__name__)

# max amount of cells of the (paths × steps) matrices simulated at once
_CHUNK_CELLS = 2 ** 22

# Gauss-Legendre rule used to integrate the densities between table nodes
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _key_part(part):
    if isinstance(part, str):
        return utiles.coherent_hash(part)
    part = int(part)
    if part < 0:
        raise ContractError("Stream keys must be non negative, got %r", part)
    return part


class RandomStream:
    """Seedable and splittable source of pseudo random numbers.

    Streams built from the same (seed, stream_id, key) produce the same sequence bit for
    bit; streams with different ids or keys are independent (numpy SeedSequence spawn
    keys).
    """

    def __init__(self, seed=None, stream_id=0, key=()):
        self.seed = config.DEFAULT_SEED if seed is None else int(seed)
        self.stream_id = int(stream_id)
        self._key = tuple(key)
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,) + self._key)
        self._generator = np.random.Generator(np.random.PCG64(seq))
        self.counter = 0

    def __repr__(self):
        return "<RandomStream seed=%d stream_id=%d key=%s>" % (
            self.seed, self.stream_id, self._key)

    def derive(self, *key):
        """An independent stream for a sub task; key parts are ints or strings."""
        return RandomStream(self.seed, self.stream_id, self._key + tuple(map(_key_part, key)))

    def _count(self, size):
        self.counter += 1 if size is None else int(np.prod(size))

    def uniform(self, size=None):
        """Uniform on (0, 1]."""
        self._count(size)
        return 1.0 - self._generator.random(size)

    def exponential(self, size=None):
        self._count(size)
        return self._generator.standard_exponential(size)

    def normal(self, size=None):
        self._count(size)
        return self._generator.standard_normal(size)


@dataclass(frozen=True)
class PathGridSpec:
    """Uniform time grid with n_steps steps on [0, horizon]."""
    horizon: float = 1.0
    n_steps: int = 1

    def __post_init__(self):
        if not self.horizon > 0:
            raise DomainError("Grid horizon must be positive, got %r", self.horizon)
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise DomainError("Grid needs a positive integer number of steps, got %r",
                              self.n_steps)

    @property
    def step(self):
        return self.horizon / self.n_steps


@dataclass(frozen=True)
class SampleBatch:
    """Draws of a named law, with what is needed to reproduce them."""
    values: np.ndarray
    alpha: float
    name: str
    seed: int
    n: int
    stream_id: int = 0

    def __post_init__(self):
        if len(self.values) != self.n:
            raise ContractError("Batch %s holds %d values, expected %d",
                                self.name, len(self.values), self.n)
        if not np.all(np.isfinite(self.values)):
            raise ContractError("Batch %s holds non finite values", self.name)

    @property
    def meta(self):
        return {'alpha': self.alpha, 'name': self.name, 'seed': self.seed, 'n': self.n,
                'stream_id': self.stream_id}


def _scalar_or_array(values, size):
    return float(values) if size is None else values


# -- the positive stable law

def sample_positive_stable(beta, rng, size=None):
    """Kanter's representation: S = (A(U) / W)^((1-β)/β), U uniform on (0, π), W Exp(1).

    E[exp(-λ S)] = exp(-λ^β).
    """
    if not 0 < beta < 1:
        raise DomainError("Positive stable index must be in (0, 1), got %r", beta)
    u = math.pi * rng.uniform(size)
    w = rng.exponential(size)
    values = np.exp((1 - beta) / beta * (stable.log_kanter(beta, u) - np.log(w)))
    return _scalar_or_array(values, size)


# -- T, T̄ and T̃ by inverse CDF

class InverseCdfTable:
    """Quantile function of a densities.RatioLaw.

    The CDF is tabulated on a log grid covering the quantiles configured; the body is
    inverted by monotone interpolation of log u against log p (from the left for p < 1/2,
    from the right otherwise) and the tails by their power laws.
    """

    def __init__(self, law, n_points=None, coverage=None):
        if n_points is None:
            n_points = config.CDF_TABLE_POINTS
        if coverage is None:
            coverage = config.CDF_TABLE_COVERAGE
        self.law = law
        self.head_exp = 1.0 + (law.head_power or 0.0)
        self.tail_exp = law.tail_power - 1.0

        u_lo = self._bracket(law.cdf, coverage / 10, 0.1)
        u_hi = self._bracket(law.sf, coverage / 10, 10.0)
        u = np.logspace(math.log10(u_lo), math.log10(u_hi), n_points)
        masses = self._panel_masses(u)
        cdf = law.cdf(u_lo) + np.concatenate(([0.0], np.cumsum(masses)))
        sf = law.sf(u_hi) + np.concatenate((np.cumsum(masses[::-1])[::-1], [0.0]))
        drift = float(np.max(np.abs(cdf + sf - 1)))
        if drift > 1e-8:
            logger.warning("Table of %r: cdf + sf drifts from 1 by %.3g", law, drift)
        logger.debug("Built inverse CDF table of %r on [%g, %g]", law, u_lo, u_hi)

        log_u = np.log(u)
        low = cdf <= 0.75
        high = sf <= 0.75
        self._log_u_lo, self._log_cdf_lo = log_u[0], math.log(cdf[0])
        self._log_u_hi, self._log_sf_hi = log_u[-1], math.log(sf[-1])
        self._lower = interpolate.PchipInterpolator(np.log(cdf[low]), log_u[low])
        self._upper = interpolate.PchipInterpolator(np.log(sf[high][::-1]), log_u[high][::-1])

    @staticmethod
    def _bracket(func, target, factor):
        u = 1.0
        for _ in range(400):
            if func(u) <= target:
                return u
            u *= factor
        raise NumericalFailure("Could not bracket the quantile %g", target)

    def _panel_masses(self, u):
        a, b = u[:-1], u[1:]
        mid, half = (a + b) / 2, (b - a) / 2
        x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        return (self.law.pdf(x) * _GL_WEIGHTS).sum(axis=1) * half

    def quantile(self, p):
        """Inverse CDF on an array of probabilities in (0, 1)."""
        p = np.asarray(p, dtype=float)
        out = np.empty_like(p)
        low = p < 0.5

        log_p = np.log(p[low])
        head = log_p < self._log_cdf_lo
        inner = np.clip(log_p, self._log_cdf_lo, None)
        out[low] = np.where(
            head, self._log_u_lo + (log_p - self._log_cdf_lo) / self.head_exp,
            self._lower(inner))

        log_q = np.log1p(-p[~low])
        tail = log_q < self._log_sf_hi
        inner = np.clip(log_q, self._log_sf_hi, None)
        out[~low] = np.where(
            tail, self._log_u_hi - (log_q - self._log_sf_hi) / self.tail_exp,
            self._upper(inner))
        return np.exp(out)


_TABLES = {}
_TABLES_LOCK = threading.Lock()


def inverse_cdf_table(name, index):
    """The InverseCdfTable of T, T̄ or T̃ at α, built once."""
    law = densities.ratio_law(name, interior_index(index).alpha)
    with _TABLES_LOCK:
        table = _TABLES.get((name, law.alpha))
        if table is None:
            table = _TABLES[(name, law.alpha)] = InverseCdfTable(law)
    return table


def _sample_ratio_law(name, index, rng, size):
    values = inverse_cdf_table(name, index).quantile(rng.uniform(1 if size is None else size))
    return float(values[0]) if size is None else values


def sample_T(index, rng, size=None):
    return _sample_ratio_law('T', index, rng, size)


def sample_Tbar(index, rng, size=None):
    return _sample_ratio_law('Tbar', index, rng, size)


def sample_Ttilde(index, rng, size=None):
    return _sample_ratio_law('Ttilde', index, rng, size)


def sample_product_T_That1(index, n, rng):
    """n independent draws of T × T̂_1, which has the law of T_1."""
    index = interior_index(index)
    t = sample_T(index, rng, size=n)
    that = sample_positive_stable(index.beta, rng, size=n)
    return SampleBatch(t * that, index.alpha, 'T1_product', rng.seed, n, rng.stream_id)


# -- the spectrally positive stable marginal

def sample_X1(index, rng, size=None):
    """X_1 with E[exp(-λ X_1)] = exp(λ^α): the totally right skewed stable law.

    Weron's form of the Chambers-Mallows-Stuck method, scaled by |cos(πα/2)|^(1/α).
    """
    alpha = interior_index(index).alpha
    u = math.pi * (rng.uniform(size) - 0.5)
    w = rng.exponential(size)
    theta = math.atan(math.tan(math.pi * alpha / 2)) / alpha
    scale = abs(math.cos(math.pi * alpha / 2)) ** (1 / alpha)

    t1 = np.sin(alpha * (u + theta)) / (math.cos(alpha * theta) * np.cos(u)) ** (1 / alpha)
    t2 = (np.cos(alpha * theta + (alpha - 1) * u) / w) ** ((1 - alpha) / alpha)
    return _scalar_or_array(scale * t1 * t2, size)


def sample_X1_conditioned_negative(index, rng, size=None, return_attempts=False):
    """X_1 given X_1 < 0, by rejection; P[X_1 < 0] = 1/α.

    With return_attempts the amount of draws of X_1 used is also returned.
    """
    alpha = interior_index(index).alpha
    n = 1 if size is None else size
    budget = config.REJECTION_BUDGET * n
    accepted = []
    n_accepted = attempts = 0
    while n_accepted < n:
        if attempts >= budget:
            raise NumericalFailure(
                "Rejection budget exhausted: %d draws accepted %d of %d", attempts, n_accepted, n)
        batch = min(budget - attempts, int(math.ceil((n - n_accepted) * alpha * 1.1)) + 16)
        draws = sample_X1(alpha, rng, size=batch)
        attempts += batch
        negative = draws[draws < 0]
        accepted.append(negative)
        n_accepted += len(negative)
    values = np.concatenate(accepted)[:n]
    logger.debug("Conditioned X_1 < 0: %d draws for %d values", attempts, n)
    result = float(values[0]) if size is None else values
    if return_attempts:
        return result, attempts
    return result


def sample_S1_via_T(index, n, rng):
    """n draws of T^(-1/α) × (-X_1 given X_1 < 0), which has the law of S_1."""
    index = interior_index(index)
    t = sample_T(index, rng, size=n)
    xneg = sample_X1_conditioned_negative(index, rng, size=n)
    return SampleBatch(-t ** -index.beta * xneg, index.alpha, 'S1_via_T', rng.seed, n,
                       rng.stream_id)


# -- grid suprema

def _path_sign(which):
    if which == 'X':
        return 1.0
    if which == 'Xhat':
        return -1.0
    raise DomainError("Path must be 'X' or 'Xhat', got %r", which)


def simulate_supremum(index, grid, rng, which='X', size=None):
    """Max of the path at the grid points (time 0 included), X or X̂ = -X.

    Increments are step^(1/α) X_1; the result underestimates the supremum.
    """
    index = interior_index(index)
    sign = _path_sign(which)
    n = 1 if size is None else size
    rows = max(1, _CHUNK_CELLS // grid.n_steps)
    scale = sign * grid.step ** index.beta
    tl = utiles.TimingLogger(30, logger.debug)
    out = np.empty(n)
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        increments = scale * sample_X1(index, rng, size=(stop - start, grid.n_steps))
        out[start:stop] = np.maximum(0.0, np.cumsum(increments, axis=1).max(axis=1))
        tl.log("Simulated %d of %d paths", stop, n)
    return _scalar_or_array(out[0] if size is None else out, size)


def simulate_supremum_refined(index, grid, rng, levels=3, which='X', size=None):
    """Grid suprema on the grids of grid.n_steps × 2^j steps, j < levels.

    All the grids share the same driving noise: coarse increments are sums of fine ones.
    Return an array of shape (levels, size).
    """
    index = interior_index(index)
    if levels < 1:
        raise DomainError("Refinement needs at least one level, got %r", levels)
    sign = _path_sign(which)
    n = 1 if size is None else size
    n_fine = grid.n_steps * 2 ** (levels - 1)
    scale = sign * (grid.horizon / n_fine) ** index.beta
    rows = max(1, _CHUNK_CELLS // n_fine)
    out = np.empty((levels, n))
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        path = np.cumsum(scale * sample_X1(index, rng, size=(stop - start, n_fine)), axis=1)
        for level in range(levels):
            stride = 2 ** (levels - 1 - level)
            coarse = path[:, stride - 1::stride]
            out[level, start:stop] = np.maximum(0.0, coarse.max(axis=1))
    return out


def sample_sup_at_exp_time(index, q, grid_step, rng, size=None):
    """Grid supremum of X on [0, τ_q], τ_q exponential of rate q independent of X.

    The grid has steps of grid_step and a last shorter step ending at τ_q.
    """
    out = sample_sup_at_exp_time_refined(index, q, grid_step, rng, levels=1, size=size)[0]
    return _scalar_or_array(out[0] if size is None else out, size)


def sample_sup_at_exp_time_refined(index, q, grid_step, rng, levels=2, size=None):
    """Grid suprema of X on [0, τ_q] with steps grid_step × 2^(levels - 1 - j), j < levels.

    The finest grid (last row) has steps of grid_step; all of them share the exponential
    time and the driving noise, and end with a shorter step at τ_q. Return an array of
    shape (levels, size).
    """
    index = interior_index(index)
    if not q > 0:
        raise DomainError("Exponential clock rate must be positive, got %r", q)
    if not grid_step > 0:
        raise DomainError("Grid step must be positive, got %r", grid_step)
    if levels < 1:
        raise DomainError("Refinement needs at least one level, got %r", levels)
    beta = index.beta
    n = 1 if size is None else size

    taus = rng.exponential(n) / q
    full = np.floor(taus / grid_step).astype(int)
    rest = taus - full * grid_step
    order = np.argsort(taus, kind='stable')
    out = np.empty((levels, n))
    pos = 0
    while pos < n:
        # paths sorted by length, so the last of a chunk is the longest
        stop = min(n, pos + max(1, _CHUNK_CELLS // (full[order[pos]] + 1)))
        while stop - pos > 1 and (stop - pos) * (full[order[stop - 1]] + 1) > _CHUNK_CELLS:
            stop = pos + (stop - pos) // 2
        idx = order[pos:stop]
        width = full[idx[-1]] + 1
        col = np.arange(width)[None, :]
        n_full = full[idx][:, None]
        scales = np.where(col < n_full, grid_step ** beta,
                          np.where(col == n_full, rest[idx][:, None] ** beta, 0.0))
        path = np.cumsum(scales * sample_X1(index, rng, size=(len(idx), width)), axis=1)
        at_tau = path[:, -1]
        for level in range(levels):
            stride = 2 ** (levels - 1 - level)
            # coarse grid points are the fine ones at multiples of stride, plus τ_q
            on_grid = (col + 1) % stride == 0
            coarse = np.where(on_grid & (col < n_full), path, -np.inf).max(axis=1)
            out[level, idx] = np.maximum(0.0, np.maximum(coarse, at_tau))
        pos = stop
    return out


def estimate_T1_samples(index, grid, n, rng):
    """n draws of (grid supremum of X on [0, 1])^(-α), an upward biased estimate of T_1.

    Paths that never go above 0 on the grid are drawn again.
    """
    index = interior_index(index)
    sups = simulate_supremum(index, grid, rng, size=n)
    redrawn = 0
    bad = sups <= 0
    while bad.any():
        redrawn += int(bad.sum())
        if redrawn > config.REJECTION_BUDGET * n:
            raise NumericalFailure("Too many paths below 0 (%d) on a grid of %d steps",
                                   redrawn, grid.n_steps)
        sups[bad] = simulate_supremum(index, grid, rng, size=int(bad.sum()))
        bad = sups <= 0
    if redrawn:
        logger.debug("Estimating T_1: %d paths never went above 0, drawn again", redrawn)
    return SampleBatch(sups ** -index.alpha, index.alpha, 'T1_grid', rng.seed, n, rng.stream_id)


# -- parallel draws

def draw_parallel(draw, n, rng, workers=None):
    """Split n draws of `draw(count, stream)` across workers, each with a derived stream.

    Pieces are concatenated in worker order: the result depends on the amount of workers
    but not on the scheduling.
    """
    if workers is None:
        workers = config.WORKERS
    workers = max(1, min(workers, n))
    counts = [n // workers + (i < n % workers) for i in range(workers)]
    payloads = [(count, rng.derive('worker', i)) for i, count in enumerate(counts)]
    results = utiles.pooled_exec(lambda payload: draw(*payload), payloads, workers)
    for ok, result in results:
        if not ok:
            raise result
    return np.concatenate([result for _, result in results])
