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

"""Tests for the quadrature and series helpers."""

import math

import pytest

from src.errors import ContractError
from src.numerics import quadrature
from src.numerics.mlf_core import eval_D, mu_integrand


@pytest.mark.parametrize('a', [0.5, 1.0, 1.5, 2.5])
def test_gamma_function(a):
    f = quadrature.Integrand(lambda t: t ** (a - 1) * math.exp(-t), head_power=a - 1,
                             exp_rate=1.0)
    result = quadrature.integrate_semi_infinite(f, tol=1e-12)
    assert result.converged
    assert result.value == pytest.approx(math.gamma(a), abs=1e-10)


def test_power_tail():
    # ∫ 1 / (1 + t)² = 1
    f = quadrature.Integrand(lambda t: 1 / (1 + t) ** 2, tail_power=2.0)
    result = quadrature.integrate_semi_infinite(f, tol=1e-12)
    assert result.value == pytest.approx(1.0, abs=1e-10)


def test_mu_mass():
    result = quadrature.integrate_semi_infinite(mu_integrand(1.5), tol=1e-10)
    assert result.converged
    assert abs(result.value - 1) <= 1e-8


def test_laplace_of_mu():
    result = quadrature.laplace_transform_numeric(mu_integrand(1.5), 1.0, tol=1e-11)
    assert result.value == pytest.approx(eval_D(1.5, 1.0).value, abs=1e-9)


def test_head_and_tail_add_up():
    f = quadrature.Integrand(lambda t: t ** -0.5 * math.exp(-t), head_power=-0.5, exp_rate=1.0)
    head = quadrature.integrate_head(f, 2.0, tol=1e-12)
    tail = quadrature.integrate_tail(f, 2.0, tol=1e-12)
    assert head.value + tail.value == pytest.approx(math.sqrt(math.pi), abs=1e-10)


def test_tail_needs_positive_start():
    f = quadrature.Integrand(lambda t: math.exp(-t), exp_rate=1.0)
    with pytest.raises(ContractError):
        quadrature.integrate_tail(f, 0.0)


@pytest.mark.parametrize('kwargs', [
    dict(head_power=-1.0),  # diverges at 0
    dict(tail_power=1.0),  # diverges at ∞
    dict(exp_rate=0.0),
    dict(breakpoints=(0.0, 1.0)),
])
def test_integrand_contract(kwargs):
    with pytest.raises(ContractError):
        quadrature.Integrand(lambda t: t, **kwargs)


def test_non_positive_tolerance():
    f = quadrature.Integrand(lambda t: math.exp(-t), exp_rate=1.0)
    with pytest.raises(ContractError):
        quadrature.integrate_semi_infinite(f, tol=0.0)


def test_laplace_variable_positive():
    f = quadrature.Integrand(lambda t: math.exp(-t), exp_rate=1.0)
    with pytest.raises(ContractError):
        quadrature.laplace_transform_numeric(f, -1.0)


class TestSumSeries:
    """Tests for the series summation."""

    def test_exponential(self):
        result = quadrature.sum_series(lambda n: (-1) ** n / math.factorial(n))
        assert result.converged
        assert result.value == pytest.approx(math.exp(-1), abs=1e-15)
        assert not result.ill_conditioned

    def test_cancellation_reported(self):
        result = quadrature.sum_series(lambda n: (-20.0) ** n / math.gamma(n + 1))
        assert result.cancellation > 1e8
        assert result.ill_conditioned

    def test_same_sign_terms(self):
        result = quadrature.sum_series(lambda n: 0.5 ** n)
        assert result.value == pytest.approx(2.0, rel=1e-14)
        assert result.cancellation == 1.0

    def test_budget_exhausted(self, logs):
        result = quadrature.sum_series(lambda n: 1.0 / (n + 1), max_terms=50)
        assert not result.converged
        assert result.abs_err == math.inf
        assert "Series budget of 50 terms exhausted" in logs.debug

    def test_non_finite_term(self):
        result = quadrature.sum_series(lambda n: math.inf if n == 3 else 1.0 / 2 ** n)
        assert not result.converged
        assert result.value == pytest.approx(1.75)
