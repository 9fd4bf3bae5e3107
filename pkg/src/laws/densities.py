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

"""Densities, distribution functions and Laplace identities of the first passage laws.

For α in (1, 2) and β = 1/α the variables involved are:

- T̂_1, positive β-stable (see src.laws.stable);
- T, T̄ and T̃, with explicit densities and f_T = (1 - β) f_T̃ + β f_T̄;
- T_1 = T × T̂_1 in law, the first passage time above 1, and S_1 = T_1^(-1/α), the
  supremum on [0, 1];
- g and h, the densities of T̃ × T̂_1 and T̄ × T̂_1, so that f_T1 = (1 - β) g + β h.

Every product law X × T̂_1 is integrated in v = log(x / t), where the factors become
localized bumps.
"""

import functools
import logging
import math
import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, interpolate, special

import config
from src.errors import DomainError, NumericalFailure, UsageError
from src.laws import stable
from src.numerics import quadrature
from src.numerics.mlf_core import (
    CONVEX, POLLARD, PRODUCT, SERIES, ZOLOTAREV, EvalResult, StabilityIndex, as_index,
    eval_D, interior_index, recip_gamma_parts, signed_exp)

logger = logging.getLogger(__name__)

# method tags only used by densities
CLOSED_FORM = 'closed_form'
TRANSFORM = 'transform'

# e-folds of the log variable kept below the scales of a product
_V_MARGIN = 40.0

# the stable factor is null where k A(0) exceeds this
_Z_NEGLIGIBLE = 60.0

# tolerances of the product quadratures
_PRODUCT_REL_TOL = 1e-10
_PRODUCT_ABS_TOL = 1e-15


class RatioLaw:
    """One of the laws of T, T̄ and T̃.

    Their densities share the denominator π (u² - 2u cos πα + 1), computed as a sum
    of squares.
    """

    NAMES = ('T', 'Tbar', 'Ttilde')

    def __init__(self, name, index):
        if name not in self.NAMES:
            raise UsageError("Unknown law %r", name)
        index = interior_index(index)
        self.name = name
        self.alpha = index.alpha
        self.beta = index.beta
        self._cos = math.cos(math.pi * self.alpha)
        self._sin = -math.sin(math.pi * self.alpha)
        if name == 'T':
            self.head_power, self.tail_power = None, 2 - self.beta
        elif name == 'Tbar':
            self.head_power, self.tail_power = self.beta, 2 - self.beta
        else:
            self.head_power, self.tail_power = None, 2.0

    def __repr__(self):
        return "<RatioLaw %s α=%g>" % (self.name, self.alpha)

    def pdf(self, u):
        """Density, on scalars or arrays; null for u ≤ 0."""
        u = np.asarray(u, dtype=float)
        positive = np.where(u > 0, u, 1.0)
        with np.errstate(over='ignore'):
            denom = math.pi * ((positive - self._cos) ** 2 + self._sin ** 2)
            if self.name == 'T':
                num = self._sin * (1 + positive ** self.beta) / self.alpha
            elif self.name == 'Tbar':
                num = self._sin * positive ** self.beta
            else:
                num = np.full_like(positive, self._sin / (self.alpha - 1))
            out = np.where(u > 0, num / denom, 0.0)
        return out if out.ndim else float(out)

    def density_at_zero(self):
        """Limit of the density at 0+."""
        if self.name == 'T':
            return self._sin / (math.pi * self.alpha)
        if self.name == 'Ttilde':
            return self._sin / ((self.alpha - 1) * math.pi)
        return 0.0

    def tail_coefficient(self):
        """A such that the survival function behaves as A u^(1 - tail_power) at ∞."""
        if self.name == 'T':
            return self._sin / (math.pi * self.alpha) / (1 - self.beta)
        if self.name == 'Tbar':
            return self._sin / math.pi / (1 - self.beta)
        return self._sin / ((self.alpha - 1) * math.pi)

    def _integrand(self):
        return quadrature.Integrand(
            self.pdf, head_power=self.head_power, tail_power=self.tail_power, breakpoints=(1.0,))

    def cdf(self, u):
        if u <= 0:
            return 0.0
        if self.name == 'Ttilde':
            return math.atan2(u * self._sin, 1 - u * self._cos) / ((self.alpha - 1) * math.pi)
        if u > 1:
            return 1.0 - self.sf(u)
        return quadrature.integrate_head(self._integrand(), u, tol=1e-15, rel_tol=1e-12).value

    def sf(self, u):
        if u <= 0:
            return 1.0
        if self.name == 'Ttilde':
            return math.atan2(self._sin, u - self._cos) / ((self.alpha - 1) * math.pi)
        if u <= 1:
            return 1.0 - self.cdf(u)
        return quadrature.integrate_tail(self._integrand(), u, tol=1e-300, rel_tol=1e-12).value


@functools.lru_cache(maxsize=64)
def ratio_law(name, alpha):
    """The RatioLaw of `name` at α (cached)."""
    return RatioLaw(name, alpha)


def _law(name, index):
    return ratio_law(name, interior_index(index).alpha)


def _check_positive(what, t):
    if not t > 0:
        raise DomainError("%s needs a positive argument, got %r", what, t)


def convex_weights(index):
    """Weights of g and h in f_T1 = (1 - β) g + β h."""
    beta = interior_index(index).beta
    return 1.0 - beta, beta


# -- T, T̄ and T̃

def density_T(index, t):
    """f_T(t) = (-sin πα)(1 + t^β) / (πα (t² - 2t cos πα + 1))."""
    _check_positive("density_T", t)
    return _law('T', index).pdf(t)


def cdf_T(index, t):
    """P[T ≤ t]."""
    return _law('T', index).cdf(t)


def sf_T(index, t):
    """P[T > t]."""
    return _law('T', index).sf(t)


def density_Tbar(index, u):
    _check_positive("density_Tbar", u)
    return _law('Tbar', index).pdf(u)


def density_Ttilde(index, u):
    _check_positive("density_Ttilde", u)
    return _law('Ttilde', index).pdf(u)


# -- T̂_1

def density_That1_integral(index, t, form=None):
    """Density of T̂_1 by an integral representation (Pollard's or Zolotarev's)."""
    index = interior_index(index)
    _check_positive("density_That1", t)
    return stable.density(index.beta, t, form=form)


def _series_eval(result, what, max_cancellation, scale=1.0):
    if max_cancellation is None:
        max_cancellation = config.CANCELLATION_LIMIT
    if not result.converged or result.cancellation > max_cancellation:
        raise NumericalFailure(
            "Series of %s is ill conditioned (cancellation %.3g)", what, result.cancellation,
            partial=result.value * scale)
    return EvalResult(result.value * scale, result.abs_err * abs(scale), SERIES, result.n_evals)


def density_That1_series(index, t, max_cancellation=None):
    """Density of T̂_1 by its series in powers of t^-β, a large t expansion."""
    index = interior_index(index)
    _check_positive("density_That1_series", t)
    result = stable.pdf_series(index.beta, t)
    return _series_eval(result, "f_That1(%g)" % t, max_cancellation)


def cdf_That1(index, t):
    return stable.cdf(interior_index(index).beta, t)


def sf_That1(index, t):
    return stable.sf(interior_index(index).beta, t)


# -- products X × T̂_1

def _v_bounds(beta, t_max):
    """Range of v = log(x / t) where product integrands are not negligible.

    Above v_hi the stable factor vanishes; below v_lo both factors are tiny.
    """
    v_hi = (1 - beta) / beta * math.log(_Z_NEGLIGIBLE / stable.kanter_at_zero(beta))
    v_lo = 2 * math.floor((min(0.0, -math.log(t_max)) - _V_MARGIN) / 2)
    return v_lo, v_hi


def product_law(law, t, kind):
    """pdf, cdf or sf of law × T̂_1 at each t of an array.

    pdf: ∫ f_X(t e^v) f_Z(e^-v) dv
    cdf: ∫ f_X(t e^v) t e^v F_Z(e^-v) dv + P[X ≤ t e^v_lo]
    sf:  ∫ f_X(t e^v) t e^v S_Z(e^-v) dv + P[X > t e^v_hi]

    Return (values, abs_err, n_evals).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    beta = law.beta
    v_lo, v_hi = _v_bounds(beta, float(t.max()))
    stable_fn = {'pdf': stable.pdf, 'cdf': stable.cdf, 'sf': stable.sf}[kind]

    def integrand(v):
        x = t * math.exp(v)
        weight = stable_fn(beta, math.exp(-v)).value
        if kind == 'pdf':
            return law.pdf(x) * weight
        return law.pdf(x) * x * weight

    # the even integers split the range, so nodes repeat across calls (and hit the cache)
    points = [float(p) for p in range(int(v_lo) + 2, int(math.ceil(v_hi)), 2)]
    values, abs_err, info = integrate.quad_vec(
        integrand, v_lo, v_hi, epsabs=_PRODUCT_ABS_TOL, epsrel=_PRODUCT_REL_TOL, norm='max',
        limit=config.MAX_SUBDIVISIONS, points=points, full_output=True)
    if not info.success:
        raise NumericalFailure(
            "Product quadrature of %s × T̂_1 (%s) did not converge", law.name, kind,
            partial=values)

    if kind == 'cdf':
        values = values + np.array([law.cdf(x) for x in t * math.exp(v_lo)])
    elif kind == 'sf':
        values = values + np.array([law.sf(x) for x in t * math.exp(v_hi)])
    return values, float(abs_err), info.neval


def _product_scalar(law, t, kind, method):
    values, abs_err, n_evals = product_law(law, t, kind)
    return EvalResult(float(values[0]), abs_err, method, n_evals)


# -- g and h

def density_g(index, t, method='integral'):
    """Density of T̃ × T̂_1.

    Methods: 'integral' (damped Pollard form), 'series' (large t expansion) and
    'transform' (the product quadrature).
    """
    index = interior_index(index)
    _check_positive("density_g", t)
    norm = index.alpha - 1
    if method == 'integral':
        result = stable.pollard_integral(index.beta, t, damped=True)
        return EvalResult(result.value / norm, result.abs_err / norm, POLLARD, result.n_work)
    if method == 'series':
        result = stable.pdf_series(index.beta, t, alternating=False)
        return _series_eval(result, "g(%g)" % t, None, scale=-1.0 / norm)
    if method == 'transform':
        return _product_scalar(_law('Ttilde', index), t, 'pdf', TRANSFORM)
    raise UsageError("Unknown method %r for g", method)


def density_h(index, t):
    """Density of T̄ × T̂_1."""
    _check_positive("density_h", t)
    return _product_scalar(_law('Tbar', index), t, 'pdf', PRODUCT)


# -- T_1

def _density_T1_two(t):
    return math.exp(-1 / (4 * t)) / (2 * t * math.sqrt(math.pi * t))


def density_T1_series(index, t, max_cancellation=None):
    """f_T1(t) = Σ_{n≥1} t^(β-n-1) / (α Γ(αn - 1) Γ(1 + β - n)), a large t expansion."""
    index = interior_index(index)
    _check_positive("density_T1_series", t)
    alpha, beta = index.alpha, index.beta
    log_t = math.log(t)
    log_alpha = math.log(alpha)

    def term(n):
        log_rg, sign = recip_gamma_parts(1 + beta - n)
        log_mag = (beta - n - 1) * log_t - log_alpha - special.gammaln(alpha * n - 1) + log_rg
        return signed_exp(sign, log_mag)

    result = quadrature.sum_series(term, start=1)
    return _series_eval(result, "f_T1(%g)" % t, max_cancellation)


def density_T1(index, t, method=None):
    """Density of T_1.

    Methods: 'series', 'product' (T × T̂_1) and 'convex' ((1 - β) g + β h). By default
    the series is used where well conditioned and the product elsewhere; α = 2 has its
    closed form.
    """
    index = as_index(index)
    _check_positive("density_T1", t)
    if index.alpha == 2:
        value = _density_T1_two(t)
        return EvalResult(value, quadrature.EPS * value, CLOSED_FORM, 1)

    if method == 'series':
        return density_T1_series(index, t)
    if method == 'product':
        return _product_scalar(_law('T', index), t, 'pdf', PRODUCT)
    if method == 'convex':
        w_g, w_h = convex_weights(index)
        g = density_g(index, t)
        h = density_h(index, t)
        return EvalResult(w_g * g.value + w_h * h.value, w_g * g.abs_err + w_h * h.abs_err,
                          CONVEX, g.n_work + h.n_work)
    if method is not None:
        raise UsageError("Unknown method %r for the density of T_1", method)

    try:
        return density_T1_series(index, t, max_cancellation=config.SERIES_WELL_CONDITIONED)
    except NumericalFailure:
        logger.debug("f_T1(%g) at α=%g: series ill conditioned, using the product form",
                     t, index.alpha)
    return _product_scalar(_law('T', index), t, 'pdf', PRODUCT)


def _T1_distribution(index, t, kind, method):
    index = as_index(index)
    if t <= 0:
        return EvalResult(0.0 if kind == 'cdf' else 1.0, 0.0, CLOSED_FORM, 1)
    if index.alpha == 2:
        fn = special.erfc if kind == 'cdf' else special.erf
        value = float(fn(1 / (2 * math.sqrt(t))))
        return EvalResult(value, quadrature.EPS, CLOSED_FORM, 1)

    if method == 'product':
        return _product_scalar(_law('T', index), t, kind, PRODUCT)
    if method == 'convex':
        w_g, w_h = convex_weights(index)
        g_part, g_err, g_n = product_law(_law('Ttilde', index), t, kind)
        h_part, h_err, h_n = product_law(_law('Tbar', index), t, kind)
        value = w_g * float(g_part[0]) + w_h * float(h_part[0])
        return EvalResult(value, w_g * g_err + w_h * h_err, CONVEX, g_n + h_n)
    raise UsageError("Unknown method %r for the law of T_1", method)


def cdf_T1(index, t, method='product'):
    """P[T_1 ≤ t], by Fubini over the product ('product') or its two parts ('convex')."""
    return _T1_distribution(index, t, 'cdf', method)


def sf_T1(index, t, method='product'):
    """P[T_1 > t]."""
    return _T1_distribution(index, t, 'sf', method)


class T1CdfTable:
    """Monotone table of the law of T_1 on a log grid, with power law tails.

    P[T_1 ≤ t] is linear near 0 and P[T_1 > t] decays as t^(β-1); both tails are
    continued from the end nodes. Instances are immutable.
    """

    def __init__(self, alpha, t_nodes, cdf_nodes, sf_nodes):
        self.alpha = alpha
        self.beta = 1.0 / alpha
        self.t_nodes = np.array(t_nodes, dtype=float)
        self.t_nodes.setflags(write=False)
        log_t = np.log(self.t_nodes)
        self._cdf = interpolate.PchipInterpolator(log_t, cdf_nodes)
        self._log_sf = interpolate.PchipInterpolator(log_t, np.log(sf_nodes))
        self._head_slope = cdf_nodes[0] / self.t_nodes[0]
        self._tail_sf = sf_nodes[-1]

    def __repr__(self):
        return "<T1CdfTable α=%g nodes=%d>" % (self.alpha, len(self.t_nodes))

    def cdf(self, t):
        """P[T_1 ≤ t] on scalars or arrays."""
        t = np.asarray(t, dtype=float)
        lo, hi = self.t_nodes[0], self.t_nodes[-1]
        out = self._cdf(np.log(np.clip(t, lo, hi)))
        out = np.where(t < lo, self._head_slope * np.maximum(t, 0.0), out)
        tail = 1.0 - self._tail_sf * (np.maximum(t, hi) / hi) ** (self.beta - 1)
        out = np.where(t > hi, tail, out)
        return out if out.ndim else float(out)

    def sf(self, t):
        """P[T_1 > t], accurate in relative terms in the right tail."""
        t = np.asarray(t, dtype=float)
        lo, hi = self.t_nodes[0], self.t_nodes[-1]
        out = np.exp(self._log_sf(np.log(np.clip(t, lo, hi))))
        out = np.where(t < lo, 1.0 - self._head_slope * np.maximum(t, 0.0), out)
        tail = self._tail_sf * (np.maximum(t, hi) / hi) ** (self.beta - 1)
        out = np.where(t > hi, tail, out)
        return out if out.ndim else float(out)


_T1_TABLES = {}
_T1_TABLES_LOCK = threading.Lock()


def _build_T1_table(index):
    lo, hi = config.T1_TABLE_RANGE
    n_nodes = int(round(math.log10(hi / lo) * config.T1_TABLE_PER_DECADE)) + 1
    t_nodes = np.logspace(math.log10(lo), math.log10(hi), n_nodes)
    logger.debug("Building T_1 table at α=%g (%d nodes)", index.alpha, n_nodes)

    if index.alpha == 2:
        cdf_nodes = special.erfc(1 / (2 * np.sqrt(t_nodes)))
        sf_nodes = special.erf(1 / (2 * np.sqrt(t_nodes)))
    else:
        law = _law('T', index)
        cdf_nodes, _, _ = product_law(law, t_nodes, 'cdf')
        sf_nodes, _, _ = product_law(law, t_nodes, 'sf')

    drift = float(np.max(np.abs(cdf_nodes + sf_nodes - 1)))
    if drift > 1e-8:
        logger.warning("T_1 table at α=%g: cdf + sf drifts from 1 by %.3g", index.alpha, drift)
    cdf_nodes = np.maximum.accumulate(np.clip(cdf_nodes, 0.0, 1.0))
    sf_nodes = np.minimum.accumulate(np.clip(sf_nodes, 1e-300, 1.0))
    return T1CdfTable(index.alpha, t_nodes, cdf_nodes, sf_nodes)


def tabulate_T1_cdf(index):
    """The T1CdfTable at α, built once per α."""
    index = as_index(index)
    with _T1_TABLES_LOCK:
        table = _T1_TABLES.get(index.alpha)
        if table is None:
            table = _T1_TABLES[index.alpha] = _build_T1_table(index)
    return table


# -- S_1

def density_S1_series(index, x, max_cancellation=None):
    """f_S1(x) = Σ_{n≥1} x^(αn-2) / (Γ(αn - 1) Γ(1 + β - n)), a small x expansion."""
    index = interior_index(index)
    _check_positive("density_S1_series", x)
    alpha, beta = index.alpha, index.beta
    log_x = math.log(x)

    def term(n):
        log_rg, sign = recip_gamma_parts(1 + beta - n)
        log_mag = (alpha * n - 2) * log_x - special.gammaln(alpha * n - 1) + log_rg
        return signed_exp(sign, log_mag)

    result = quadrature.sum_series(term, start=1)
    return _series_eval(result, "f_S1(%g)" % x, max_cancellation)


def density_S1(index, x, method=None):
    """Density of S_1: the series, or α x^(-α-1) f_T1(x^-α) with the product form."""
    index = as_index(index)
    _check_positive("density_S1", x)
    if index.alpha == 2:
        value = math.exp(-x * x / 4) / math.sqrt(math.pi)
        return EvalResult(value, quadrature.EPS * value, CLOSED_FORM, 1)
    if method == 'series':
        return density_S1_series(index, x)
    if method is None:
        try:
            return density_S1_series(index, x, max_cancellation=config.SERIES_WELL_CONDITIONED)
        except NumericalFailure:
            logger.debug("f_S1(%g) at α=%g: series ill conditioned, using the product form",
                         x, index.alpha)
    elif method != 'product':
        raise UsageError("Unknown method %r for the density of S_1", method)
    alpha = index.alpha
    factor = alpha * x ** (-alpha - 1)
    f_t1 = _product_scalar(_law('T', index), x ** -alpha, 'pdf', PRODUCT)
    return EvalResult(factor * f_t1.value, factor * f_t1.abs_err, PRODUCT, f_t1.n_work)


def cdf_S1(index, x):
    """P[S_1 ≤ x]: the integrated series where well conditioned, else P[T_1 ≥ x^-α]."""
    index = as_index(index)
    if x <= 0:
        return EvalResult(0.0, 0.0, CLOSED_FORM, 1)
    if index.alpha < 2:
        alpha, beta = index.alpha, index.beta
        log_x = math.log(x)

        def term(n):
            log_rg, sign = recip_gamma_parts(1 + beta - n)
            log_mag = (alpha * n - 1) * log_x - special.gammaln(alpha * n) + log_rg
            return signed_exp(sign, log_mag)

        result = quadrature.sum_series(term, start=1)
        if result.converged and result.cancellation <= config.SERIES_WELL_CONDITIONED:
            return EvalResult(result.value, result.abs_err, SERIES, result.n_evals)
        logger.debug("F_S1(%g) at α=%g: series ill conditioned, using T_1", x, alpha)
    return sf_T1(index, x ** -index.alpha)


# -- Laplace transforms and the supremum at an exponential time

@dataclass(frozen=True)
class SurvivalQuery:
    """P[S_τq ≥ x] where τ_q is an exponential time of rate q independent of X."""
    q: float
    x: float
    index: StabilityIndex

    def __post_init__(self):
        if not self.q > 0:
            raise DomainError("Exponential clock rate must be positive, got %r", self.q)
        if not self.x >= 0:
            raise DomainError("Barrier level must be non negative, got %r", self.x)


def survival_S_tau(query):
    """P[S_τq ≥ x] = D_α(q^(1/α) x)."""
    index = as_index(query.index)
    return eval_D(index, query.q ** index.beta * query.x)


def _near(a, b):
    return abs(a - b) <= 1e-9 * max(abs(a), abs(b))


def _check_rates(q, lam):
    if not (q > 0 and lam > 0):
        raise DomainError("Killing rate and Laplace variable must be positive, got q=%r, λ=%r",
                          q, lam)


def wh_laplace_S_tau(index, q, lam):
    """E[exp(-λ S_τq)] = q (λ - q^β) / (q^β (λ^α - q)), continuous at λ = q^β."""
    index = as_index(index)
    _check_rates(q, lam)
    alpha, beta = index.alpha, index.beta
    q_beta = q ** beta
    if _near(lam, q_beta):
        return 1.0 / alpha
    return q * (lam - q_beta) / (q_beta * (lam ** alpha - q))


def survival_laplace_closed_form(index, q, lam):
    """∫ exp(-λx) P[S_τq ≥ x] dx = (λ^(α-1) - q^(1-β)) / (λ^α - q)."""
    index = as_index(index)
    _check_rates(q, lam)
    alpha, beta = index.alpha, index.beta
    q_beta = q ** beta
    if _near(lam, q_beta):
        return (alpha - 1) / (alpha * q_beta)
    return (lam ** (alpha - 1) - q ** (1 - beta)) / (lam ** alpha - q)


def laplace_T1_product(index, y, tol=None):
    """E[exp(-y T_1)] as ∫ f_T(s) exp(-(y s)^β) ds, by Fubini over T × T̂_1."""
    law = _law('T', index)
    if not y > 0:
        raise DomainError("Laplace variable must be positive, got %r", y)
    beta = law.beta

    def func(s):
        return law.pdf(s) * math.exp(-(y * s) ** beta)

    f = quadrature.Integrand(func, tail_power=law.tail_power, breakpoints=(1.0, 1.0 / y))
    return quadrature.integrate_semi_infinite(f, tol=tol)


# -- dispatch by DensitySpec

_VALID_METHODS = {
    'T': (CLOSED_FORM,),
    'Tbar': (CLOSED_FORM,),
    'Ttilde': (CLOSED_FORM,),
    'That1': (POLLARD, ZOLOTAREV, SERIES),
    'g_That1': (POLLARD, SERIES, TRANSFORM),
    'h_That1': (PRODUCT,),
    'T1': (SERIES, PRODUCT, CONVEX, CLOSED_FORM),
    'S1': (SERIES, PRODUCT, CLOSED_FORM),
}
_SHORT_METHOD = {SERIES: 'series', PRODUCT: 'product', CONVEX: 'convex', POLLARD: 'integral',
                 TRANSFORM: 'transform', CLOSED_FORM: None, None: None}


@dataclass(frozen=True)
class DensitySpec:
    """A named density, its index and the representation to use (None: automatic)."""
    name: str
    index: StabilityIndex
    method: Optional[str] = None

    def __post_init__(self):
        if self.name not in _VALID_METHODS:
            raise UsageError(
                "Unknown density %r (known: %s)", self.name, ", ".join(_VALID_METHODS))
        if self.method is not None and self.method not in _VALID_METHODS[self.name]:
            raise UsageError(
                "Method %r is not valid for the density of %s", self.method, self.name)
        index = as_index(self.index)
        object.__setattr__(self, 'index', index)
        if index.interior:
            if self.method == CLOSED_FORM and self.name in ('T1', 'S1'):
                raise DomainError("The %s closed form only exists at α = 2", self.name)
        elif not (self.name in ('T1', 'S1') and self.method in (None, CLOSED_FORM)):
            raise DomainError("Density of %s needs α strictly inside (1, 2)", self.name)


def evaluate_density(spec, t):
    """Evaluate the density described by the DensitySpec at t."""
    name, index, method = spec.name, spec.index, spec.method
    if name in RatioLaw.NAMES:
        _check_positive(name, t)
        value = _law(name, index).pdf(t)
        return EvalResult(value, quadrature.EPS * value, CLOSED_FORM, 1)
    if name == 'That1':
        if method == SERIES:
            return density_That1_series(index, t)
        return density_That1_integral(index, t, form=method)
    if name == 'g_That1':
        return density_g(index, t, method=_SHORT_METHOD[method] or 'integral')
    if name == 'h_That1':
        return density_h(index, t)
    if name == 'T1':
        return density_T1(index, t, method=_SHORT_METHOD[method])
    return density_S1(index, t, method=_SHORT_METHOD[method])
