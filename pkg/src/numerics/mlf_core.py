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

"""Mittag-Leffler functions, the function D_α and their Bernstein densities.

E_a(x) = Σ x^n / Γ(1 + a n) and D_α(x) = E_α(x^α) - α x^(α-1) E_α'(x^α), which is
completely monotone for α in [1, 2] with Bernstein density mu_density.
"""

import logging
import math
from dataclasses import dataclass

from scipy import special

import config
from src.errors import DomainError, NumericalFailure
from src.numerics import quadrature

logger = logging.getLogger(__name__)

# method tags of EvalResult
SERIES = 'series'
BERNSTEIN = 'bernstein_quadrature'
DIRECT = 'direct_formula'
PRODUCT = 'product_quadrature'
CONVEX = 'convex_combination'
POLLARD = 'pollard_integral'
ZOLOTAREV = 'zolotarev_integral'


@dataclass(frozen=True)
class StabilityIndex:
    """The stability index α of the process, in (1, 2].

    `widened` admits the boundary α = 1, only meaningful for D_α.
    """
    alpha: float
    widened: bool = False

    def __post_init__(self):
        low_ok = self.alpha > 1 or (self.widened and self.alpha == 1)
        if not (low_ok and self.alpha <= 2):
            raise DomainError("Stability index must be in (1, 2], got %r", self.alpha)

    @property
    def beta(self):
        return 1.0 / self.alpha

    @property
    def interior(self):
        """True if strictly inside (1, 2), where T, T̄, T̃ and μ_α have densities."""
        return 1 < self.alpha < 2


@dataclass(frozen=True)
class MLOrder:
    """Order of a Mittag-Leffler function."""
    order: float

    def __post_init__(self):
        if not self.order > 0:
            raise DomainError("Mittag-Leffler order must be positive, got %r", self.order)


@dataclass(frozen=True)
class EvalResult:
    """A value with its estimated absolute error, the code path taken and the work done."""
    value: float
    abs_err: float
    method: str
    n_work: int = 1

    def __float__(self):
        return float(self.value)


def as_index(index, widened=False):
    """Accept a StabilityIndex or a plain number."""
    if isinstance(index, StabilityIndex):
        return index
    return StabilityIndex(float(index), widened=widened)


def interior_index(index):
    """Return the index, refusing the α = 2 endpoint (no densities there)."""
    index = as_index(index)
    if not index.interior:
        raise DomainError("Operation needs α strictly inside (1, 2), got %r", index.alpha)
    return index


def as_order(order):
    if isinstance(order, MLOrder):
        return order
    return MLOrder(float(order))


def recip_gamma_parts(z):
    """Return (log|1/Γ(z)|, sign of 1/Γ(z)); the sign is 0 at the poles of Γ."""
    if z <= 0 and z == math.floor(z):
        return -math.inf, 0
    return -float(special.gammaln(z)), int(special.gammasgn(z))


def signed_exp(sign, log_mag):
    """sign × exp(log_mag), infinite instead of overflowing (series stop on it)."""
    if sign == 0:
        return 0.0
    if log_mag > 700:
        return sign * math.inf
    return sign * math.exp(log_mag)


def from_quad(result, method):
    """Turn a QuadResult into an EvalResult."""
    return EvalResult(result.value, result.abs_err, method, max(1, result.n_evals))


def _accepted(result, tol):
    if not (math.isfinite(result.value) and math.isfinite(result.abs_err)):
        return False
    return result.converged and result.abs_err <= tol * max(1.0, abs(result.value))


def _mlf_series(order, x, derivative=False):
    """Series of E_a(x), or of E_a'(x) = Σ_{n≥1} x^(n-1) / (a Γ(a n))."""
    log_x = math.log(abs(x))
    negative = x < 0

    if derivative:
        log_a = math.log(order)

        def term(n):
            sign = -1 if (negative and (n - 1) % 2) else 1
            return signed_exp(sign, (n - 1) * log_x - log_a - special.gammaln(order * n))
        start = 1
    else:
        def term(n):
            if n == 0:
                return 1.0
            sign = -1 if (negative and n % 2) else 1
            return signed_exp(sign, n * log_x - special.gammaln(1 + order * n))
        start = 0

    return quadrature.sum_series(term, start=start)


def _mlf_negative_by_quadrature(order, y, tol, derivative=False):
    """E_β(-y), or E_β'(-y), for β in (0, 1) through ∫ exp(-s u) K_β(u) du, s = y^(1/β).

    The derivative is (1/β) y^(1/β - 1) ∫ u exp(-s u) K_β(u) du.
    """
    s = y ** (1.0 / order)
    if derivative:
        f = quadrature.Integrand(
            lambda u: u * mlf_neg_power_bernstein_density(order, u),
            head_power=order, breakpoints=(1.0,))
        result = quadrature.laplace_transform_numeric(f, s, tol=tol)
        scale = s / (order * y)
        return quadrature.QuadResult(
            result.value * scale, result.abs_err * scale, result.n_evals, result.converged)
    f = quadrature.Integrand(
        lambda u: mlf_neg_power_bernstein_density(order, u),
        head_power=order - 1, tail_power=1 + order, breakpoints=(1.0,))
    return quadrature.laplace_transform_numeric(f, s, tol=tol)


def _series_reachable(order, x):
    """False where the series of E_a(x), x < 0, a < 1, would cancel beyond repair."""
    return not (x < 0 and order < 1 and (-x) ** (1.0 / order) > config.MLF_SERIES_REACH)


def _mlf_dispatch(order, x, tol, derivative):
    what = "E_%g'" % order if derivative else "E_%g" % order
    if _series_reachable(order, x):
        result = _mlf_series(order, x, derivative=derivative)
        if _accepted(result, tol):
            return from_quad(result, SERIES)
        if not (x < 0 and order < 1):
            raise NumericalFailure(
                "Mittag-Leffler series of %s at %g did not reach tolerance (err=%g)",
                what, x, result.abs_err, partial=result.value)
        logger.debug("%s(%g): series cancels (ratio %.3g), using quadrature",
                     what, x, result.cancellation)
    else:
        logger.debug("%s(%g): series cancels beyond reach, using quadrature", what, x)

    quad = _mlf_negative_by_quadrature(order, -x, tol, derivative=derivative)
    if not (quad.converged and math.isfinite(quad.value)):
        raise NumericalFailure(
            "Bernstein quadrature of %s at %g did not converge", what, x, partial=quad.value)
    return from_quad(quad, BERNSTEIN)


def eval_mlf(order, x, tol=None):
    """Evaluate the Mittag-Leffler function E_order(x) for real x."""
    order = as_order(order).order
    if tol is None:
        tol = config.EVAL_TOL

    if x == 0:
        return EvalResult(1.0, 0.0, SERIES, 1)
    try:
        if order == 1:
            return EvalResult(math.exp(x), quadrature.EPS * math.exp(x), DIRECT, 1)
        if order == 2:
            value = math.cosh(math.sqrt(x)) if x > 0 else math.cos(math.sqrt(-x))
            return EvalResult(value, quadrature.EPS * abs(value), DIRECT, 1)
    except OverflowError:
        raise NumericalFailure("E_%g(%g) overflows", order, x, partial=math.inf)
    return _mlf_dispatch(order, x, tol, derivative=False)


def eval_mlf_derivative(order, x, tol=None):
    """Evaluate E_order'(x)."""
    order = as_order(order).order
    if tol is None:
        tol = config.EVAL_TOL

    if x == 0:
        value = 1.0 / math.gamma(1 + order)
        return EvalResult(value, quadrature.EPS * value, SERIES, 1)
    try:
        if order == 1:
            return EvalResult(math.exp(x), quadrature.EPS * math.exp(x), DIRECT, 1)
        if order == 2:
            r = math.sqrt(abs(x))
            value = math.sinh(r) / (2 * r) if x > 0 else math.sin(r) / (2 * r)
            return EvalResult(value, quadrature.EPS * abs(value), DIRECT, 1)
    except OverflowError:
        raise NumericalFailure("E_%g'(%g) overflows", order, x, partial=math.inf)
    return _mlf_dispatch(order, x, tol, derivative=True)


def _denominator(t_pow, alpha):
    """t^(2α) - 2 t^α cos πα + 1 written as a sum of squares."""
    c = math.cos(math.pi * alpha)
    s = math.sin(math.pi * alpha)
    return (t_pow - c) ** 2 + s * s


def mu_density(index, t):
    """Bernstein density of D_α."""
    alpha = as_index(index).alpha
    if not 1 < alpha < 2:
        raise DomainError("The Bernstein measure of D_%g has no density", alpha)
    if t <= 0:
        raise DomainError("mu_density needs t > 0, got %r", t)
    t_alpha = t ** alpha
    num = -math.sin(math.pi * alpha) * t ** (alpha - 1) * (1 + t)
    return num / (math.pi * _denominator(t_alpha, alpha))


def mu_integrand(index):
    """The Integrand of μ_α with its declared behaviour at 0 and ∞."""
    alpha = as_index(index).alpha
    return quadrature.Integrand(
        lambda t: mu_density(alpha, t), head_power=alpha - 1, tail_power=alpha,
        breakpoints=(1.0,))


def _d_series(alpha, x, tol):
    y = x ** alpha
    e = eval_mlf(alpha, y, tol=tol)
    ed = eval_mlf_derivative(alpha, y, tol=tol)
    factor = alpha * x ** (alpha - 1)
    value = e.value - factor * ed.value
    abs_err = e.abs_err + factor * ed.abs_err
    return EvalResult(value, abs_err, SERIES, e.n_work + ed.n_work)


def _d_quadrature(alpha, x, tol):
    def func(t):
        return math.exp(-x * t) * mu_density(alpha, t)

    if x >= 1:
        f = quadrature.Integrand(
            func, head_power=alpha - 1, exp_rate=x, breakpoints=tuple(sorted({1.0 / x, 1.0})))
    else:
        f = quadrature.Integrand(func, head_power=alpha - 1, tail_power=alpha, breakpoints=(1.0,))
    result = quadrature.integrate_semi_infinite(f, tol=tol)
    if not result.converged:
        raise NumericalFailure(
            "Bernstein quadrature of D_%g at %g did not converge", alpha, x,
            partial=result.value)
    return from_quad(result, BERNSTEIN)


def eval_D(index, x, tol=None, method=None):
    """Evaluate D_α(x) for α in [1, 2] and x ≥ 0.

    Small x goes through the two series, large x through the Laplace transform of
    μ_α; `method` forces one of them (SERIES or BERNSTEIN).
    """
    alpha = as_index(index, widened=True).alpha
    if tol is None:
        tol = config.EVAL_TOL
    if x < 0:
        raise DomainError("D_α needs x ≥ 0, got %r", x)

    if x == 0:
        return EvalResult(1.0, 0.0, DIRECT, 1)
    if alpha == 1:
        return EvalResult(0.0, 0.0, DIRECT, 1)
    if alpha == 2:
        return EvalResult(math.exp(-x), quadrature.EPS * math.exp(-x), DIRECT, 1)

    if method == SERIES:
        return _d_series(alpha, x, tol)
    if method == BERNSTEIN:
        return _d_quadrature(alpha, x, tol)

    if x <= config.D_SWITCH:
        try:
            result = _d_series(alpha, x, tol)
        except NumericalFailure as err:
            logger.debug("D_%g(%g): series failed (%s), switching to quadrature", alpha, x, err)
        else:
            if result.abs_err <= tol:
                return result
            logger.debug("D_%g(%g): series cancellation error %g above %g, "
                         "switching to quadrature", alpha, x, result.abs_err, tol)
    return _d_quadrature(alpha, x, tol)


def eval_D4_golden(x):
    """D_4 in closed form; it takes negative values, so D_4 is not CM."""
    return 0.5 * (math.exp(-x) + math.cos(x) + math.sin(x))


def eval_F(index, x, tol=None):
    """F_α(x) = D_α(x^(1/α)), the Laplace transform of the law of T_1."""
    index = as_index(index)
    if x < 0:
        raise DomainError("F_α needs x ≥ 0, got %r", x)
    return eval_D(index, x ** index.beta, tol=tol)


def signed_bernstein_density_small_alpha(order, t):
    """Bernstein density of -D_order for order in (0, 1); its total mass is infinite."""
    order = as_order(order).order
    if not 0 < order < 1:
        raise DomainError("Signed Bernstein density needs order in (0, 1), got %r", order)
    if t <= 0:
        raise DomainError("Signed Bernstein density needs t > 0, got %r", t)
    num = math.sin(math.pi * order) * t ** (order - 1) * (1 + t)
    return num / (math.pi * _denominator(t ** order, order))


def mlf_neg_power_bernstein_density(order, u):
    """Bernstein density K_β of x -> E_β(-x^β), for β in (0, 1)."""
    beta = as_order(order).order
    if not 0 < beta < 1:
        raise DomainError("Bernstein density needs order in (0, 1), got %r", beta)
    if u <= 0:
        raise DomainError("Bernstein density needs u > 0, got %r", u)
    c = math.cos(math.pi * beta)
    s = math.sin(math.pi * beta)
    u_beta = u ** beta
    return (s / math.pi) * u ** (beta - 1) / ((u_beta + c) ** 2 + s * s)


def mlf_neg_bernstein_density(order, u):
    """Bernstein density of x -> E_β(-x), for β in (0, 1).

    This is the density of the Mittag-Leffler law Z^(-β), with Z positive β-stable.
    """
    from src.laws import stable

    beta = as_order(order).order
    if not 0 < beta < 1:
        raise DomainError("Bernstein density needs order in (0, 1), got %r", beta)
    if u <= 0:
        raise DomainError("Bernstein density needs u > 0, got %r", u)
    z = u ** (-1.0 / beta)
    return z / (beta * u) * stable.pdf(beta, z).value
