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

"""Error controlled semi-infinite integration and series summation.

Everything here wraps QUADPACK (through scipy) on a partition of [0, ∞) built from
what the caller declares about its integrand: the power behaviour at the origin, the
decay at infinity and the points where the integrand has its features.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

import config
from src.errors import ContractError

logger = logging.getLogger(__name__)

# machine epsilon, the relative tolerance used to sum series to full precision
EPS = float(np.finfo(float).eps)

# maximum amount of panels used to cover an exponentially decaying tail
_MAX_TAIL_PANELS = 64


@dataclass(frozen=True)
class QuadResult:
    """Outcome of an integral or a series.

    `cancellation` is the ratio between the largest partial sum (in absolute value)
    and the result; it is 1 for integrals and for series of same-sign terms.
    """
    value: float
    abs_err: float
    n_evals: int
    converged: bool
    cancellation: float = 1.0

    @property
    def ill_conditioned(self):
        return self.cancellation > config.CANCELLATION_LIMIT


@dataclass(frozen=True)
class Integrand:
    """A real function on (0, ∞) and what is known about it.

    - head_power: p > -1 such that func(t) ~ t**p when t -> 0 (None if regular)
    - exp_rate: r > 0 such that func(t) = O(exp(-r t)) when t -> ∞
    - tail_power: q > 1 such that func(t) ~ t**-q when t -> ∞
    - breakpoints: points where the integrand has its features (peaks, kinks)
    """
    func: Callable[[float], float]
    head_power: Optional[float] = None
    exp_rate: Optional[float] = None
    tail_power: Optional[float] = None
    breakpoints: Sequence[float] = field(default_factory=tuple)

    def __post_init__(self):
        if self.head_power is not None and self.head_power <= -1:
            raise ContractError(
                "Declared head power %r makes the integral diverge at 0", self.head_power)
        if self.tail_power is not None and self.tail_power <= 1:
            raise ContractError(
                "Declared tail power %r makes the integral diverge at ∞", self.tail_power)
        if self.exp_rate is not None and self.exp_rate <= 0:
            raise ContractError("Declared exponential rate %r is not positive", self.exp_rate)
        if any(b <= 0 for b in self.breakpoints):
            raise ContractError("Breakpoints must be positive, got %r", self.breakpoints)


def quad_panel(func, a, b, tol, rel_tol=0.0, points=None):
    """Integrate func on [a, b] (b may be infinite) with QUADPACK.

    Return (value, abs_err, n_evals, ok).
    """
    kwargs = dict(epsabs=tol, epsrel=rel_tol, limit=config.MAX_SUBDIVISIONS, full_output=1)
    if points is not None and math.isfinite(b):
        inner = [p for p in points if a < p < b]
        if inner:
            kwargs['points'] = inner
    out = integrate.quad(func, a, b, **kwargs)
    value, abs_err, info = out[:3]
    # when QUADPACK is not happy a message is appended to the result
    ok = len(out) == 3
    if not ok:
        logger.debug("Quadrature on [%g, %g] not converged: %s", a, b, out[3])
    return value, abs_err, info['neval'], ok


def _safe(func):
    """Wrap func so overflowing arguments produce a null contribution."""
    def wrapped(t):
        if not math.isfinite(t):
            return 0.0
        value = func(t)
        return value if math.isfinite(value) else 0.0
    return wrapped


def _head_panel(f, b, tol, rel_tol):
    """Integrate on [0, b] substituting t = u**k so that a t**p behaviour becomes flat."""
    p = f.head_power
    if p is None or p == 0:
        return quad_panel(f.func, 0.0, b, tol, rel_tol)
    k = 1.0 / (1.0 + p)

    def substituted(u):
        return f.func(u ** k) * k * u ** (k - 1)

    return quad_panel(_safe(substituted), 0.0, b ** (1.0 + p), tol, rel_tol)


def _tail_panel(f, c, tol, rel_tol):
    """Integrate on [c, ∞) according to the declared decay."""
    if f.tail_power is not None:
        # t = c s**-m turns a t**-q tail into a flat integrand on (0, 1]
        m = 1.0 / (f.tail_power - 1.0)

        def substituted(s):
            return f.func(c * s ** -m) * c * m * s ** (-m - 1)

        return quad_panel(_safe(substituted), 0.0, 1.0, tol, rel_tol)

    if f.exp_rate is not None:
        # truncate where the exponential envelope is negligible; panels of a few
        # e-folds each so the adaptive rule sees the decay
        length = (math.log(1.0 / tol) + 10.0) / f.exp_rate
        n_panels = min(_MAX_TAIL_PANELS, max(1, int(length * f.exp_rate / 4)))
        edges = np.linspace(c, c + length, n_panels + 1)
        value = abs_err = 0.0
        n_evals = 0
        ok = True
        for a, b in zip(edges[:-1], edges[1:]):
            v, e, n, panel_ok = quad_panel(_safe(f.func), a, b, tol / n_panels, rel_tol)
            value += v
            abs_err += e
            n_evals += n
            ok = ok and panel_ok
        return value, abs_err, n_evals, ok

    return quad_panel(_safe(f.func), c, np.inf, tol, rel_tol)


def integrate_semi_infinite(f, tol=None, rel_tol=0.0):
    """Integrate the Integrand f on [0, ∞).

    The half line is split at the declared breakpoints (at 1 if none): a head panel with
    the power substitution, compact middle panels and the tail panel.
    """
    if tol is None:
        tol = config.QUAD_TOL
    if tol <= 0:
        raise ContractError("Tolerance must be positive, got %r", tol)

    edges = sorted(set(f.breakpoints)) or [1.0]
    n_panels = len(edges) + 1
    panel_tol = tol / n_panels

    pieces = [_head_panel(f, edges[0], panel_tol, rel_tol)]
    for a, b in zip(edges[:-1], edges[1:]):
        pieces.append(quad_panel(_safe(f.func), a, b, panel_tol, rel_tol))
    pieces.append(_tail_panel(f, edges[-1], panel_tol, rel_tol))

    value = math.fsum(p[0] for p in pieces)
    abs_err = sum(p[1] for p in pieces)
    n_evals = sum(p[2] for p in pieces)
    converged = all(p[3] for p in pieces) and abs_err <= max(tol, rel_tol * abs(value))
    return QuadResult(value=value, abs_err=abs_err, n_evals=max(1, n_evals), converged=converged)


def integrate_head(f, b, tol=None, rel_tol=0.0):
    """Integrate the Integrand f on [0, b]."""
    if tol is None:
        tol = config.QUAD_TOL
    value, abs_err, n_evals, ok = _head_panel(f, b, tol, rel_tol)
    return QuadResult(value=value, abs_err=abs_err, n_evals=max(1, n_evals), converged=ok)


def integrate_tail(f, c, tol=None, rel_tol=0.0):
    """Integrate the Integrand f on [c, ∞), c > 0."""
    if tol is None:
        tol = config.QUAD_TOL
    if c <= 0:
        raise ContractError("Tail integration needs a positive start, got %r", c)
    value, abs_err, n_evals, ok = _tail_panel(f, c, tol, rel_tol)
    return QuadResult(value=value, abs_err=abs_err, n_evals=max(1, n_evals), converged=ok)


def laplace_transform_numeric(f, s, tol=None, rel_tol=0.0):
    """Return ∫₀^∞ exp(-s t) f(t) dt."""
    if s <= 0:
        raise ContractError("Laplace variable must be positive, got %r", s)

    def damped(t):
        return math.exp(-s * t) * f.func(t)

    rate = s + (f.exp_rate or 0.0)
    breakpoints = tuple(f.breakpoints) or (min(1.0, 1.0 / s),)
    g = Integrand(damped, head_power=f.head_power, exp_rate=rate, breakpoints=breakpoints)
    return integrate_semi_infinite(g, tol=tol, rel_tol=rel_tol)


def sum_series(term, tol=EPS, max_terms=None, start=0):
    """Sum term(n) for n = start, start + 1, ...

    Stops after config.SERIES_QUIET_TERMS consecutive terms below tol times the partial
    sum. Tracks the largest partial sum to report the cancellation ratio.
    """
    if max_terms is None:
        max_terms = config.MAX_TERMS
    partial = 0.0
    sum_abs = 0.0
    max_partial = 0.0
    quiet = 0
    tail_bound = 0.0
    n = start
    for n in range(start, start + max_terms):
        t = term(n)
        if not math.isfinite(t):
            logger.debug("Series term %d is not finite, stopping", n)
            return QuadResult(
                value=partial, abs_err=math.inf, n_evals=max(1, n - start),
                converged=False, cancellation=math.inf)
        partial += t
        if not math.isfinite(partial):
            logger.debug("Series partial sum overflows at term %d, stopping", n)
            return QuadResult(
                value=partial, abs_err=math.inf, n_evals=n - start + 1,
                converged=False, cancellation=math.inf)
        sum_abs += abs(t)
        max_partial = max(max_partial, abs(partial))
        if abs(t) <= tol * abs(partial) or abs(t) < 1e-300:
            quiet += 1
            tail_bound += abs(t)
            if quiet >= config.SERIES_QUIET_TERMS:
                break
        else:
            quiet = 0
            tail_bound = 0.0
    else:
        logger.debug("Series budget of %d terms exhausted", max_terms)
        return QuadResult(
            value=partial, abs_err=math.inf, n_evals=max_terms, converged=False,
            cancellation=max_partial / abs(partial) if partial else math.inf)

    abs_err = tail_bound + 4 * EPS * sum_abs
    if partial:
        cancellation = max(1.0, max_partial / abs(partial))
    else:
        cancellation = 1.0 if max_partial == 0 else math.inf
    return QuadResult(
        value=partial, abs_err=abs_err, n_evals=n - start + 1, converged=True,
        cancellation=cancellation)
