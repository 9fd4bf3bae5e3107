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

"""The positive β-stable law, E[exp(-λ Z)] = exp(-λ^β), β in (0, 1).

Three representations are used:

- Zolotarev's non oscillatory integral on (0, π) of Kanter's function A, for the density,
  CDF and survival at small and moderate arguments;
- the series in powers of x^-β, which converges fast at large arguments;
- Pollard's damped oscillatory integral on (0, ∞), only usable where its integrand does
  not grow much before the damping takes over.
"""

import functools
import logging
import math

import numpy as np
from scipy import optimize, special

import config
from src.errors import DomainError, NumericalFailure
from src.numerics import quadrature
from src.numerics.mlf_core import (
    EvalResult, POLLARD, SERIES, ZOLOTAREV, recip_gamma_parts, signed_exp)

logger = logging.getLogger(__name__)

# relative tolerance of the Zolotarev integrals
ZOLOTAREV_REL_TOL = 1e-10

# the large argument series is tried from here on
SERIES_FROM = 10.0

# beyond this level of k A(φ) the integrands are negligible
_NEGLIGIBLE = 50.0

_PHI_EPS = 1e-12


def _check_beta(beta):
    if not 0 < beta < 1:
        raise DomainError("Positive stable index must be in (0, 1), got %r", beta)


def log_kanter(beta, phi):
    """Logarithm of Kanter's function A(φ), φ in (0, π), on arrays.

    A(φ) = [sin(βφ)^β sin((1-β)φ)^(1-β) / sin φ]^(1/(1-β))
    """
    return (beta * np.log(np.sin(beta * phi)) + (1 - beta) * np.log(np.sin((1 - beta) * phi))
            - np.log(np.sin(phi))) / (1 - beta)


def _log_kanter_scalar(beta, phi):
    return (beta * math.log(math.sin(beta * phi))
            + (1 - beta) * math.log(math.sin((1 - beta) * phi))
            - math.log(math.sin(phi))) / (1 - beta)


def kanter_at_zero(beta):
    """A(0+) = (1 - β) β^(β / (1 - β)), the minimum of A."""
    return (1 - beta) * beta ** (beta / (1 - beta))


def _phi_at_level(beta, log_k, level):
    """Solve k A(φ) = level (A is increasing); None if the level is not reached inside."""
    target = math.log(level) - log_k

    def g(phi):
        return _log_kanter_scalar(beta, phi) - target

    lo, hi = _PHI_EPS, math.pi - _PHI_EPS
    if g(lo) >= 0 or g(hi) <= 0:
        return None
    return optimize.brentq(g, lo, hi, xtol=1e-14)


def _zolotarev(beta, x, kind):
    """Integrals over (0, π) giving the pdf, cdf or sf at x > 0."""
    log_k = -beta / (1 - beta) * math.log(x)

    def k_a(phi):
        exponent = log_k + _log_kanter_scalar(beta, phi)
        return math.exp(min(exponent, 700.0))

    if kind == 'pdf':
        def func(phi):
            value = k_a(phi)
            return value * math.exp(-value)
    elif kind == 'cdf':
        def func(phi):
            return math.exp(-k_a(phi))
    else:
        def func(phi):
            return -math.expm1(-k_a(phi))

    upper = math.pi
    if kind != 'sf':
        # past this point the integrand is exp(-50) times its value at φ = 0
        k_a0 = math.exp(log_k) * kanter_at_zero(beta)
        cut = _phi_at_level(beta, log_k, k_a0 + _NEGLIGIBLE)
        if cut is not None:
            upper = cut
    points = (_phi_at_level(beta, log_k, level) for level in (0.1, 1.0, 10.0))
    edges = [0.0] + sorted(p for p in points if p is not None and p < upper) + [upper]

    value = abs_err = 0.0
    n_evals = 0
    for a, b in zip(edges[:-1], edges[1:]):
        v, e, n, _ = quadrature.quad_panel(func, a, b, 1e-300, ZOLOTAREV_REL_TOL)
        value += v
        abs_err += e
        n_evals += n
    value /= math.pi
    abs_err /= math.pi

    if kind == 'pdf':
        # the integrand carries k A(φ), leaving β/(1-β) x^(-1)
        factor = beta / (1 - beta) / x
        value *= factor
        abs_err *= factor
    return EvalResult(value, abs_err, ZOLOTAREV, max(1, n_evals))


def pdf_series(beta, x, alternating=True):
    """Σ_{n≥1} (±1)^n x^(-1-nβ) / (Γ(-nβ) n!); with alternating=True this is the density."""
    _check_beta(beta)
    log_x = math.log(x)

    def term(n):
        log_rg, sign = recip_gamma_parts(-n * beta)
        if alternating and n % 2:
            sign = -sign
        return signed_exp(sign, log_rg - (1 + n * beta) * log_x - special.gammaln(n + 1))

    return quadrature.sum_series(term, start=1)


def sf_series(beta, x):
    """P[Z > x] = Σ_{n≥1} (-1)^(n+1) x^(-nβ) / (Γ(1-nβ) n!)."""
    _check_beta(beta)
    log_x = math.log(x)

    def term(n):
        log_rg, sign = recip_gamma_parts(1 - n * beta)
        if not n % 2:
            sign = -sign
        return signed_exp(sign, log_rg - n * beta * log_x - special.gammaln(n + 1))

    return quadrature.sum_series(term, start=1)


@functools.lru_cache(maxsize=2 ** 16)
def _evaluate(beta, x, kind):
    """Series at large x when well conditioned, Zolotarev's integral otherwise.

    Product quadratures ask for the same nodes over and over, hence the cache.
    """
    if x >= SERIES_FROM:
        result = pdf_series(beta, x) if kind == 'pdf' else sf_series(beta, x)
        if result.converged and result.cancellation <= config.SERIES_WELL_CONDITIONED:
            value = 1.0 - result.value if kind == 'cdf' else result.value
            return EvalResult(value, result.abs_err, SERIES, result.n_evals)
    return _zolotarev(beta, x, kind)


def pdf(beta, x):
    """Density of Z at x."""
    _check_beta(beta)
    if x <= 0:
        return EvalResult(0.0, 0.0, ZOLOTAREV, 1)
    return _evaluate(beta, x, 'pdf')


def cdf(beta, x):
    """P[Z ≤ x]."""
    _check_beta(beta)
    if x <= 0:
        return EvalResult(0.0, 0.0, ZOLOTAREV, 1)
    return _evaluate(beta, x, 'cdf')


def sf(beta, x):
    """P[Z > x]."""
    _check_beta(beta)
    if x <= 0:
        return EvalResult(1.0, 0.0, ZOLOTAREV, 1)
    return _evaluate(beta, x, 'sf')


def pollard_growth(beta, t):
    """Log of the largest growth of exp(-t u + |cos πβ| u^β) over u > 0."""
    c = -math.cos(math.pi * beta)
    if c <= 0:
        return 0.0
    u_star = (beta * c / t) ** (1.0 / (1 - beta))
    return max(0.0, -t * u_star + c * u_star ** beta)


def pollard_integral(beta, t, damped=False, tol=None):
    """(1/π) ∫₀^∞ exp(-t u ∓ u^β cos πβ) sin(u^β sin πβ) du.

    With damped=False the exponent is -t u - u^β cos πβ: the density of Z. With
    damped=True it is -t u + u^β cos πβ, (α - 1) times the density of T̃ × Z.
    Integrates panel by panel between the zeros of the sine.
    """
    _check_beta(beta)
    if t <= 0:
        raise DomainError("Pollard integral needs t > 0, got %r", t)
    if tol is None:
        tol = config.EVAL_TOL
    cos_b = math.cos(math.pi * beta)
    sin_b = math.sin(math.pi * beta)
    sign = -1.0 if damped else 1.0

    if not damped:
        growth = pollard_growth(beta, t)
        if growth > config.POLLARD_MAX_GROWTH:
            raise NumericalFailure(
                "Pollard integral at t=%g grows by exp(%.3g) before decaying", t, growth)

    def log_envelope(u):
        return -t * u - sign * u ** beta * cos_b

    def func(u):
        return math.exp(log_envelope(u)) * math.sin(u ** beta * sin_b)

    panel_tol = tol * 1e-3
    stop_level = math.log(panel_tol)
    total = abs_err = 0.0
    n_evals = 0
    a = 0.0
    for k in range(1, config.MAX_TERMS + 1):
        b = (k * math.pi / sin_b) ** (1.0 / beta)
        v, e, n, _ = quadrature.quad_panel(func, a, b, panel_tol, 1e-10)
        total += v
        abs_err += e
        n_evals += n
        # past its maximum the envelope decreases; stop when a whole panel is negligible
        if log_envelope(b) < log_envelope(a) and log_envelope(b) + math.log(b - a) < stop_level:
            break
        a = b
    else:
        raise NumericalFailure(
            "Pollard integral at t=%g needs more than %d panels", t, config.MAX_TERMS,
            partial=total / math.pi)
    return EvalResult(total / math.pi, (abs_err + panel_tol) / math.pi, POLLARD, n_evals)


def density(beta, x, form=None):
    """Density of Z: Pollard's integral when well conditioned, the other forms otherwise.

    `form` forces POLLARD or ZOLOTAREV.
    """
    _check_beta(beta)
    if form == ZOLOTAREV:
        if x <= 0:
            return EvalResult(0.0, 0.0, ZOLOTAREV, 1)
        return _zolotarev(beta, x, 'pdf')
    if form == POLLARD:
        return pollard_integral(beta, x)
    if x > 0 and pollard_growth(beta, x) <= config.POLLARD_MAX_GROWTH:
        try:
            return pollard_integral(beta, x)
        except NumericalFailure as err:
            logger.debug("Pollard integral failed at %g (%s), using Zolotarev's", x, err)
    return pdf(beta, x)
