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

"""Checks that need no random input: identities, asymptotes and constants.

A check made of several parts reports, as statistic, the worst ratio between a part
statistic and its threshold (so its threshold is 1); the parts go to the details.
"""

import logging
import math

import numpy as np
from scipy import special

import config
from src.checks.report import CheckReport, TailConstant, kappa_target
from src.errors import NumericalFailure
from src.laws import densities
from src.numerics import quadrature
from src.numerics.mlf_core import (
    BERNSTEIN, SERIES, as_index, eval_D, eval_D4_golden, eval_F, eval_mlf,
    interior_index, mlf_neg_bernstein_density, mu_density, mu_integrand)

logger = logging.getLogger(__name__)

EPS = quadrature.EPS


def compose(name, alpha, components, details):
    """Build the report of a check made of parts {part: (statistic, threshold)}."""
    details = dict(details)
    details['thresholds'] = 'engineering'
    if len(components) == 1:
        (part, (statistic, threshold)), = components.items()
        details['part'] = part
        return CheckReport(name, alpha, float(statistic), float(threshold), details)

    details['parts'] = {part: {'statistic': float(s), 'threshold': float(t)}
                        for part, (s, t) in components.items()}
    ratios = [s / t if t > 0 else (0.0 if s <= 0 else math.inf)
              for s, t in components.values()]
    return CheckReport(name, alpha, float(max(ratios)), 1.0, details)


def _alpha_of(index):
    return float(getattr(index, 'alpha', index))


def alternating_differences(func, x_grid, order_max, step=0.25):
    """Check that (-1)^k Δ_h^k f ≥ 0 for k ≤ order_max at every x of the grid.

    `func` returns (value, abs_err); h = step × max(x, 0.1). A difference smaller than
    its propagated error bound is counted as unresolved, not as a violation. Return
    (violations, unresolved, witness of the first violation or None).
    """
    violations = unresolved = 0
    witness = None
    for x in x_grid:
        h = step * max(x, 0.1)
        evaluated = [func(x + j * h) for j in range(order_max + 1)]
        values = [v for v, _ in evaluated]
        errors = [e for _, e in evaluated]
        for k in range(1, order_max + 1):
            terms = [(-1) ** (k - j) * special.comb(k, j, exact=True) * values[j]
                     for j in range(k + 1)]
            diff = math.fsum(terms)
            bound = 2 ** k * max(errors[:k + 1]) + 4 * EPS * sum(abs(t) for t in terms)
            if abs(diff) <= bound:
                unresolved += 1
            elif (-1) ** k * diff < 0:
                violations += 1
                if witness is None:
                    witness = {'x': float(x), 'h': float(h), 'order': k, 'difference': diff}
    return violations, unresolved, witness


def check_cm(index, x_grid=None, order_max=4, tol=None):
    """Complete monotonicity of D_α.

    Interior α: positivity of μ_α, unit mass, D_α against the Laplace transform of μ_α
    and the alternating differences. α = 2 compares with exp(-x); α = 4 takes the closed
    form of D_4, which must fail.
    """
    alpha = _alpha_of(index)
    if tol is None:
        tol = 1e-8
    x_grid = np.logspace(-2, 2, 21) if x_grid is None else np.asarray(x_grid, dtype=float)
    details = {'x_grid': x_grid.tolist(), 'order_max': order_max, 'tol': tol}
    components = {}

    if alpha == 4:
        def func(x):
            return eval_D4_golden(x), 4 * EPS

        probes = np.linspace(0, 20, 201)
        values = np.array([eval_D4_golden(x) for x in probes])
        pos = int(values.argmin())
        components['negative_values'] = (int((values < 0).sum()), 0.5)
        details['negativity_witness'] = {'x': float(probes[pos]), 'value': float(values[pos])}
    else:
        index = as_index(alpha, widened=True)

        def func(x):
            result = eval_D(index, x)
            return result.value, result.abs_err

        if alpha == 2:
            probes = np.linspace(0, 20, 201)
            golden = max(abs(eval_D(index, x).value - math.exp(-x)) for x in probes)
            components['golden_error'] = (golden, 1e-12)
        elif index.interior:
            components.update(_bernstein_parts(index, x_grid, tol, details))

    violations, unresolved, witness = alternating_differences(func, x_grid, order_max)
    components['difference_sign_violations'] = (violations, 0.5)
    details['unresolved_differences'] = unresolved
    if witness is not None:
        details['difference_witness'] = witness
    return compose('cm', alpha, components, details)


def _bernstein_parts(index, x_grid, tol, details):
    """μ_α ≥ 0, its mass, and D_α by series against its Bernstein quadrature."""
    probes = np.logspace(-6, 6, 241)
    negatives = sum(1 for t in probes if mu_density(index, t) < 0)

    mass = quadrature.integrate_semi_infinite(mu_integrand(index), tol=1e-12)
    mass_error = abs(mass.value - 1)

    worst = 0.0
    compared = 0
    for x in x_grid:
        if x > config.D_OVERLAP[1]:
            continue
        try:
            series = eval_D(index, x, method=SERIES)
        except NumericalFailure:
            continue
        if series.abs_err > tol:
            continue
        bernstein = eval_D(index, x, tol=tol / 10, method=BERNSTEIN)
        worst = max(worst, abs(series.value - bernstein.value))
        compared += 1
    details['laplace_points_compared'] = compared
    return {
        'mu_negative_values': (negatives, 0.5),
        'mu_mass_error': (mass_error, tol),
        'laplace_residual': (worst, tol),
    }


def check_mlf_negative_cm(index, x_grid=None, order_max=4, order=None):
    """x -> E_β(-x) is completely monotone, β = 1/α unless `order` is given."""
    alpha = _alpha_of(index)
    beta = 1.0 / alpha if order is None else float(order)
    x_grid = np.logspace(-2, 2, 21) if x_grid is None else np.asarray(x_grid, dtype=float)
    details = {'order': beta, 'x_grid': x_grid.tolist(), 'order_max': order_max}
    components = {}
    if beta < 1:
        probes = np.logspace(-4, 1, 51)
        negatives = sum(1 for u in probes if mlf_neg_bernstein_density(beta, u) < 0)
        components['density_negative_values'] = (negatives, 0.5)

    def func(x):
        result = eval_mlf(beta, -x)
        return result.value, result.abs_err

    violations, unresolved, witness = alternating_differences(func, x_grid, order_max)
    components['difference_sign_violations'] = (violations, 0.5)
    details['unresolved_differences'] = unresolved
    if witness is not None:
        details['difference_witness'] = witness
    return compose('mlf_negative_cm', alpha, components, details)


def check_mu_concentration(index, delta=0.1, levels=6):
    """The mass of μ_α in [1 - δ, 1 + δ] grows as α goes to 2 (μ_α tends to δ_1).

    Uses the indices α_k = 2 - (2 - α) / 2^k.
    """
    alpha = interior_index(index).alpha
    alphas = [2 - (2 - alpha) / 2 ** k for k in range(levels)]
    masses = []
    for a in alphas:
        value, _, _, _ = quadrature.quad_panel(
            lambda t, a=a: mu_density(a, t), 1 - delta, 1 + delta, 1e-12, 1e-10)
        masses.append(value)
    decreases = sum(1 for m0, m1 in zip(masses[:-1], masses[1:]) if m1 <= m0)
    details = {'delta': delta, 'alphas': alphas, 'masses': masses}
    return compose('mu_concentration', alpha, {'mass_decreases': (decreases, 0.5)}, details)


def _mlf_laplace_residual(index, q, lam, tol):
    """|∫ exp(-λx) E_α(q x^α) dx - λ^(α-1) / (λ^α - q)|, for λ > q^(1/α)."""
    alpha = index.alpha
    rate = lam - q ** index.beta

    def func(x):
        return math.exp(-lam * x) * eval_mlf(alpha, q * x ** alpha).value

    f = quadrature.Integrand(func, exp_rate=rate, breakpoints=(1.0,))
    result = quadrature.integrate_semi_infinite(f, tol=tol / 10)
    return abs(result.value - lam ** (alpha - 1) / (lam ** alpha - q))


def _wh_residuals(index, q, lam, tol):
    """Numerical Laplace transform of x -> P[S_τq ≥ x] against its closed forms."""
    q_beta = q ** index.beta

    def survival(x):
        return eval_D(index, q_beta * x).value

    f = quadrature.Integrand(survival, tail_power=index.alpha, breakpoints=(1.0 / q_beta,))
    transform = quadrature.laplace_transform_numeric(f, lam, tol=tol / 10).value
    closed = densities.survival_laplace_closed_form(index, q, lam)
    wh = densities.wh_laplace_S_tau(index, q, lam)
    return abs(transform - closed), abs((1 - lam * transform) - wh)


def check_laplace_identities(index, q_list=(1.0, 2.0, 0.5), lambda_list=(2.0, 2.0, 1.0),
                             y_list=None, tol=None):
    """Laplace transforms: of E_α(q x^α), of the law of T_1, and of the Wiener-Hopf factor.

    q_list and lambda_list go in pairs; y_list are the points for the law of T_1.
    """
    index = interior_index(index)
    if tol is None:
        tol = 1e-6
    if y_list is None:
        y_list = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0]
    pairs = list(zip(q_list, lambda_list))
    details = {'pairs': pairs, 'y_list': list(y_list), 'tol': tol}

    mlf_err = max((_mlf_laplace_residual(index, q, lam, tol)
                   for q, lam in pairs if lam > q ** index.beta), default=0.0)
    laplace_T1 = max(abs(densities.laplace_T1_product(index, y, tol=tol / 10).value
                         - eval_F(index, y).value) for y in y_list)

    survival_err = wh_err = 0.0
    for q, lam in pairs:
        s_err, w_err = _wh_residuals(index, q, lam, tol)
        survival_err = max(survival_err, s_err)
        wh_err = max(wh_err, w_err)

    # both closed forms are continuous where λ = q^(1/α)
    continuity = 0.0
    for q, _ in pairs:
        at = q ** index.beta
        for fn in (densities.wh_laplace_S_tau, densities.survival_laplace_closed_form):
            v0, v1 = fn(index, q, at), fn(index, q, at * (1 + 1e-6))
            continuity = max(continuity, abs(v0 - v1) if math.isfinite(v0) else math.inf)

    components = {
        'mlf_laplace_residual': (mlf_err, tol),
        'T1_laplace_residual': (laplace_T1, tol),
        'survival_laplace_residual': (survival_err, tol),
        'wiener_hopf_residual': (wh_err, tol),
        'continuity_jump': (continuity, 1e-5),
    }
    return compose('laplace_identities', index.alpha, components, details)


def thm3_deterministic(index, t_grid=None, tol=None):
    """Largest |series - product| of f_T1 on the grid; return (residual, details)."""
    if tol is None:
        tol = 1e-6
    t_grid = np.geomspace(0.5, 20, 12) if t_grid is None else np.asarray(t_grid, dtype=float)
    worst = 0.0
    for t in t_grid:
        series = densities.density_T1(index, t, method='series')
        product = densities.density_T1(index, t, method='product')
        worst = max(worst, abs(series.value - product.value))
    return worst, {'t_grid': t_grid.tolist(), 'tol': tol}


def validate_neg_bernstein_density(order, x_grid=None, tol=1e-7):
    """∫ exp(-x u) f_β(u) du against E_β(-x): the oracle of the Mittag-Leffler density."""
    beta = float(order)
    x_grid = np.logspace(-1, 1, 9) if x_grid is None else np.asarray(x_grid, dtype=float)
    f = quadrature.Integrand(
        lambda u: mlf_neg_bernstein_density(beta, u), exp_rate=1.0, breakpoints=(1.0,))
    worst = 0.0
    for x in x_grid:
        transform = quadrature.laplace_transform_numeric(f, x, tol=tol / 100).value
        worst = max(worst, abs(transform - eval_mlf(beta, -x).value))
    details = {'order': beta, 'x_grid': x_grid.tolist(), 'tol': tol}
    return compose('neg_bernstein_density', 1.0 / beta, {'laplace_residual': (worst, tol)},
                   details)


def corollary4_integral(index, x, tol=1e-8):
    """∫∫ f_{1/α}(u) exp(-s x^α / u^α) f_T(s) du ds, outer over u and inner over s."""
    law = densities.ratio_law('T', index.alpha)
    alpha, beta = index.alpha, index.beta

    def inner(u):
        y = (x / u) ** alpha

        def func(s):
            return law.pdf(s) * math.exp(-y * s)

        breaks = tuple(sorted({1.0, 1.0 / y})) if 0 < y < 1e300 else (1.0,)
        g = quadrature.Integrand(func, tail_power=law.tail_power, breakpoints=breaks)
        return quadrature.integrate_semi_infinite(g, tol=tol / 10).value

    def outer(u):
        return mlf_neg_bernstein_density(beta, u) * inner(u)

    f = quadrature.Integrand(outer, exp_rate=1.0, breakpoints=(1.0,))
    return quadrature.integrate_semi_infinite(f, tol=tol)


def check_corollary4(index, x_list=(0.5, 1.0, 2.0), tol=None):
    """D_α(x) as the double integral over the Mittag-Leffler law and the law of T."""
    index = interior_index(index)
    if tol is None:
        tol = 1e-5
    oracle = validate_neg_bernstein_density(index.beta)
    details = {'x_list': list(x_list), 'tol': tol, 'oracle_statistic': oracle.statistic}
    if not oracle.passed:
        logger.warning("Mittag-Leffler density failed its oracle at α=%g", index.alpha)
        details['error'] = "Mittag-Leffler density oracle failed"
        return compose('corollary4', index.alpha,
                       {'oracle': (oracle.statistic, oracle.threshold)}, details)

    worst = 0.0
    for x in x_list:
        double = corollary4_integral(index, x).value
        worst = max(worst, abs(double - eval_D(index, x).value))
    return compose('corollary4', index.alpha, {'double_integral_residual': (worst, tol)},
                   details)


def estimate_tail_constant(index, t_probes=None, tol=None):
    """t^(1-1/α) P[T_1 ≥ t] along the probes, against κ = 1 / (Γ(α) Γ(1/α)).

    Return (TailConstant at the largest probe, CheckReport).
    """
    index = as_index(index)
    alpha, beta = index.alpha, index.beta
    if t_probes is None:
        t_probes = config.TAIL_PROBES
    if tol is None:
        tol = config.TAIL_REL_TOL
    target = kappa_target(alpha)

    estimates = []
    h_shares = []
    for t in t_probes:
        survival = densities.sf_T1(index, t).value
        estimates.append(t ** (1 - beta) * survival)
        if index.interior:
            h_part, _, _ = densities.product_law(densities.ratio_law('Tbar', alpha), t, 'sf')
            h_shares.append(beta * float(h_part[0]) / survival)

    errors = [abs(e / target - 1) for e in estimates]
    details = {'t_probes': list(t_probes), 'estimates': estimates, 'target': target,
               'relative_errors': errors, 'tol': tol}
    if h_shares:
        details['h_share'] = h_shares
    if errors[-1] > tol and any(e1 > e0 for e0, e1 in zip(errors[:-1], errors[1:])):
        # the estimates are not approaching the constant: the probes are too small
        details['inconclusive'] = True
        logger.warning("Tail constant at α=%g inconclusive, relative errors %s", alpha, errors)
    report = compose('tail_constant', alpha, {'relative_error': (errors[-1], tol)}, details)
    return TailConstant(estimates[-1], alpha), report


def check_tail_constant(index, t_probes=None, tol=None):
    _, report = estimate_tail_constant(index, t_probes, tol)
    return report


def check_small_time(index, t_probes=None, tol=None):
    """P[T_1 ≤ t] / t towards -Γ(α) sin(πα) / π = -1 / Γ(1 - α) as t goes to 0."""
    index = interior_index(index)
    alpha = index.alpha
    if t_probes is None:
        t_probes = config.SMALL_TIME_PROBES
    if tol is None:
        tol = config.SMALL_TIME_REL_TOL
    target = -math.gamma(alpha) * math.sin(math.pi * alpha) / math.pi
    reflection = abs(target + 1 / math.gamma(1 - alpha))

    ratios = [densities.cdf_T1(index, t, method='convex').value / t for t in t_probes]
    smallest = int(np.argmin(t_probes))
    error = abs(ratios[smallest] / target - 1)
    details = {'t_probes': list(t_probes), 'ratios': ratios, 'target': target, 'tol': tol}
    components = {
        'relative_error': (error, tol),
        'reflection_identity': (reflection, 1e-12),
    }
    return compose('small_time', alpha, components, details)


def _trend_violations(values):
    """Times a sequence stops growing."""
    return sum(1 for v0, v1 in zip(values[:-1], values[1:]) if v1 < v0 - 1e-12)


def check_convex_decomposition(index, t_grid=None, tol=None):
    """f_T1 = (1 - β) g + β h pointwise, g ≥ 0, and the regimes of the two parts.

    The g part must take over as t goes to 0 and the h part as t goes to ∞.
    """
    index = interior_index(index)
    if tol is None:
        tol = 1e-6
    t_grid = np.geomspace(0.1, 20, 9) if t_grid is None else np.asarray(t_grid, dtype=float)
    w_g, w_h = densities.convex_weights(index)

    def parts(t):
        f = densities.density_T1(index, t, method='product').value
        g = densities.density_g(index, t).value
        h = densities.density_h(index, t).value
        return f, g, h

    residual = 0.0
    negatives = 0
    for t in t_grid:
        f, g, h = parts(t)
        residual = max(residual, abs(f - (w_g * g + w_h * h)))
        negatives += g < 0

    small, large = [1e-1, 1e-2, 1e-3], [1e1, 1e2, 1e3]
    g_ratios = []
    for t in small:
        f, g, _ = parts(t)
        g_ratios.append(w_g * g / f)
    h_ratios = []
    for t in large:
        f, _, h = parts(t)
        h_ratios.append(w_h * h / f)

    details = {'t_grid': t_grid.tolist(), 'weights': {'g': w_g, 'h': w_h}, 'tol': tol,
               'g_ratio_probes': small, 'g_ratios': g_ratios,
               'h_ratio_probes': large, 'h_ratios': h_ratios}
    components = {
        'pointwise_residual': (residual, tol),
        'g_negative_values': (negatives, 0.5),
        'regime_trend_violations': (_trend_violations(g_ratios) + _trend_violations(h_ratios),
                                    0.5),
    }
    return compose('convex', index.alpha, components, details)
