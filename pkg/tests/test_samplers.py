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

"""Tests for the samplers and the grid simulations."""

import math

import numpy as np
import pytest
from scipy import special, stats

from src.errors import ContractError, DomainError, NumericalFailure
from src.laws import densities, samplers
from src.laws.samplers import PathGridSpec, RandomStream, SampleBatch
from src.numerics import quadrature
from src.numerics.mlf_core import StabilityIndex


def ks_bound(n):
    # 1% critical value
    return 1.63 / math.sqrt(n)


class TestRandomStream:
    """Tests for the seeded streams."""

    def test_reproducible(self):
        a = RandomStream(7).uniform(10)
        b = RandomStream(7).uniform(10)
        np.testing.assert_array_equal(a, b)

    def test_default_seed(self, mocker):
        mocker.patch('config.DEFAULT_SEED', 123)
        assert RandomStream().seed == 123

    def test_streams_differ(self):
        base = RandomStream(7)
        assert not np.array_equal(base.derive('a').uniform(5), base.derive('b').uniform(5))
        assert not np.array_equal(RandomStream(7, stream_id=1).uniform(5),
                                  RandomStream(7).uniform(5))

    def test_derive_is_stable(self):
        first = RandomStream(7).derive('check', 1500000).normal(3)
        second = RandomStream(7).derive('check', 1500000).normal(3)
        np.testing.assert_array_equal(first, second)

    def test_derive_does_not_consume(self):
        base = RandomStream(7)
        expected = RandomStream(7).uniform(3)
        base.derive('other').uniform(100)
        np.testing.assert_array_equal(base.uniform(3), expected)

    def test_negative_key(self):
        with pytest.raises(ContractError):
            RandomStream(7).derive(-1)

    def test_uniform_range(self):
        u = RandomStream(3).uniform(100000)
        assert u.min() > 0
        assert u.max() <= 1

    def test_counter(self):
        rng = RandomStream(3)
        rng.uniform()
        rng.exponential((2, 5))
        rng.normal(4)
        assert rng.counter == 15


class TestValueObjects:
    """Tests for the grid and batch descriptions."""

    @pytest.mark.parametrize('horizon, n_steps', [(0.0, 4), (-1.0, 4), (1.0, 0), (1.0, 2.5)])
    def test_bad_grid(self, horizon, n_steps):
        with pytest.raises(DomainError):
            PathGridSpec(horizon, n_steps)

    def test_step(self):
        assert PathGridSpec(2.0, 8).step == 0.25

    def test_batch_size(self):
        with pytest.raises(ContractError):
            SampleBatch(np.ones(3), 1.5, 'T', 42, 4)

    def test_batch_finite(self):
        with pytest.raises(ContractError):
            SampleBatch(np.array([1.0, np.inf]), 1.5, 'T', 42, 2)

    def test_meta(self):
        batch = SampleBatch(np.ones(2), 1.5, 'T', 42, 2, stream_id=3)
        assert batch.meta == {'alpha': 1.5, 'name': 'T', 'seed': 42, 'n': 2, 'stream_id': 3}


class TestPositiveStable:
    """Tests for Kanter's sampler."""

    def test_levy(self):
        n = 20000
        draws = samplers.sample_positive_stable(0.5, RandomStream(42), size=n)
        statistic = stats.kstest(draws, lambda x: special.erfc(1 / (2 * np.sqrt(x)))).statistic
        assert statistic < ks_bound(n)

    def test_laplace(self):
        n = 100000
        draws = samplers.sample_positive_stable(2 / 3, RandomStream(42), size=n)
        values = np.exp(-draws)
        stderr = values.std() / math.sqrt(n)
        assert abs(values.mean() - math.exp(-1)) < 3 * stderr

    def test_scalar(self):
        value = samplers.sample_positive_stable(0.7, RandomStream(1))
        assert isinstance(value, float)
        assert value > 0

    def test_bad_index(self):
        with pytest.raises(DomainError):
            samplers.sample_positive_stable(1.0, RandomStream(1))


class TestRatioLaws:
    """Tests for the inverse CDF samplers of T, T̄ and T̃."""

    @pytest.mark.parametrize('name', ['T', 'Tbar', 'Ttilde'])
    def test_quantiles_invert_cdf(self, name):
        table = samplers.inverse_cdf_table(name, 1.5)
        law = densities.ratio_law(name, 1.5)
        p = np.array([1e-8, 1e-3, 0.1, 0.5, 0.9, 0.999, 1 - 1e-8])
        u = table.quantile(p)
        assert np.all(np.diff(u) > 0)
        for prob, value in zip(p[1:-1], u[1:-1]):
            assert law.cdf(value) == pytest.approx(prob, rel=1e-4)

    def test_cached(self):
        assert samplers.inverse_cdf_table('T', 1.5) is samplers.inverse_cdf_table(
            'T', StabilityIndex(1.5))

    def test_T_median(self):
        n = 20000
        draws = samplers.sample_T(1.5, RandomStream(42), size=n)
        p = densities.cdf_T(1.5, float(np.median(draws)))
        # the empirical median has standard deviation 1 / (2 √n) on the probability scale
        assert abs(p - 0.5) < 3 / (2 * math.sqrt(n))

    def test_Ttilde_functional(self):
        n = 20000
        law = densities.ratio_law('Ttilde', 1.5)
        draws = samplers.sample_Ttilde(1.5, RandomStream(42), size=n)
        values = 1 / (1 + draws ** 2)
        f = quadrature.Integrand(lambda u: law.pdf(u) / (1 + u * u), tail_power=4.0,
                                 breakpoints=(1.0,))
        expected = quadrature.integrate_semi_infinite(f, tol=1e-10).value
        assert abs(values.mean() - expected) < 3 * values.std() / math.sqrt(n)

    def test_Tbar_ks(self):
        n = 5000
        law = densities.ratio_law('Tbar', 1.5)
        draws = samplers.sample_Tbar(1.5, RandomStream(42), size=n)
        statistic = stats.kstest(draws, np.vectorize(law.cdf)).statistic
        assert statistic < ks_bound(n)

    def test_scalar(self):
        assert isinstance(samplers.sample_T(1.5, RandomStream(1)), float)


class TestX1:
    """Tests for the spectrally positive marginal."""

    def test_laplace(self):
        n = 200000
        draws = samplers.sample_X1(1.5, RandomStream(42), size=n)
        values = np.exp(-0.5 * draws)
        stderr = values.std() / math.sqrt(n)
        assert abs(values.mean() - math.exp(0.5 ** 1.5)) < 3 * stderr

    @pytest.mark.parametrize('alpha', [1.2, 1.5, 1.8])
    def test_negative_probability(self, alpha):
        n = 100000
        draws = samplers.sample_X1(alpha, RandomStream(42), size=n)
        p = 1 / alpha
        assert abs(np.mean(draws < 0) - p) < 4 * math.sqrt(p * (1 - p) / n)

    def test_conditioned(self):
        values, attempts = samplers.sample_X1_conditioned_negative(
            1.5, RandomStream(42), size=5000, return_attempts=True)
        assert len(values) == 5000
        assert np.all(values < 0)
        assert attempts >= 5000

    def test_conditioned_budget(self, mocker):
        mocker.patch('config.REJECTION_BUDGET', 1)
        mocker.patch('src.laws.samplers.sample_X1', return_value=np.ones(17))
        with pytest.raises(NumericalFailure):
            samplers.sample_X1_conditioned_negative(1.5, RandomStream(42))


class TestIdentities:
    """Tests for the exact samplers of T_1 and S_1."""

    def test_product_law(self):
        n = 20000
        batch = samplers.sample_product_T_That1(1.5, n, RandomStream(7))
        assert batch.name == 'T1_product'
        assert batch.seed == 7
        table = densities.tabulate_T1_cdf(1.5)
        statistic = stats.kstest(batch.values, table.cdf).statistic
        assert statistic < ks_bound(n)

    def test_S1_law(self):
        n = 10000
        batch = samplers.sample_S1_via_T(1.5, n, RandomStream(7))
        assert np.all(batch.values > 0)
        table = densities.tabulate_T1_cdf(1.5)
        statistic = stats.kstest(batch.values, lambda x: table.sf(x ** -1.5)).statistic
        assert statistic < ks_bound(n)


class TestGridSuprema:
    """Tests for the grid simulations."""

    def test_supremum_non_negative(self):
        sups = samplers.simulate_supremum(1.5, PathGridSpec(1.0, 64), RandomStream(1), size=500)
        assert sups.shape == (500,)
        assert np.all(sups >= 0)

    def test_chunks(self, mocker):
        mocker.patch('src.laws.samplers._CHUNK_CELLS', 64)
        sups = samplers.simulate_supremum(1.5, PathGridSpec(1.0, 16), RandomStream(1), size=50)
        assert sups.shape == (50,)

    def test_bad_path(self):
        with pytest.raises(DomainError):
            samplers.simulate_supremum(1.5, PathGridSpec(), RandomStream(1), which='Y')

    def test_refinement_monotone(self):
        sups = samplers.simulate_supremum_refined(
            1.5, PathGridSpec(1.0, 32), RandomStream(1), levels=3, size=300)
        assert sups.shape == (3, 300)
        assert np.all(np.diff(sups, axis=0) >= 0)

    def test_refinement_levels(self):
        with pytest.raises(DomainError):
            samplers.simulate_supremum_refined(1.5, PathGridSpec(), RandomStream(1), levels=0)

    def test_exp_time(self):
        sups = samplers.sample_sup_at_exp_time(1.5, 1.0, 1 / 64, RandomStream(1), size=2000)
        assert sups.shape == (2000,)
        assert np.all(sups >= 0)
        # P[S_τ ≥ 0] = 1 but the grid misses some excursions right after 0
        assert np.mean(sups > 0) > 0.5

    def test_exp_time_small_chunks(self, mocker):
        first = samplers.sample_sup_at_exp_time(1.5, 2.0, 1 / 16, RandomStream(5), size=200)
        mocker.patch('src.laws.samplers._CHUNK_CELLS', 128)
        second = samplers.sample_sup_at_exp_time(1.5, 2.0, 1 / 16, RandomStream(5), size=200)
        assert first.shape == second.shape
        assert np.all(second >= 0)
        assert np.mean(second) == pytest.approx(np.mean(first), rel=0.5)

    def test_exp_time_refined(self):
        sups = samplers.sample_sup_at_exp_time_refined(
            1.5, 1.0, 1 / 32, RandomStream(2), levels=3, size=400)
        assert sups.shape == (3, 400)
        assert np.all(np.diff(sups, axis=0) >= 0)

    def test_exp_time_single_level_matches(self):
        plain = samplers.sample_sup_at_exp_time(1.5, 1.0, 1 / 32, RandomStream(4), size=100)
        refined = samplers.sample_sup_at_exp_time_refined(
            1.5, 1.0, 1 / 32, RandomStream(4), levels=1, size=100)
        np.testing.assert_array_equal(plain, refined[0])

    @pytest.mark.parametrize('q, step', [(0.0, 0.1), (1.0, 0.0)])
    def test_exp_time_domain(self, q, step):
        with pytest.raises(DomainError):
            samplers.sample_sup_at_exp_time(1.5, q, step, RandomStream(1))

    def test_T1_estimates(self):
        batch = samplers.estimate_T1_samples(1.5, PathGridSpec(1.0, 128), 500, RandomStream(1))
        assert batch.name == 'T1_grid'
        assert np.all(batch.values > 0)


class TestDrawParallel:
    """Tests for the fan out of draws."""

    def draw(self, count, stream):
        return stream.uniform(count)

    def test_sizes(self):
        values = samplers.draw_parallel(self.draw, 10, RandomStream(1), workers=3)
        assert len(values) == 10

    def test_reproducible(self):
        first = samplers.draw_parallel(self.draw, 100, RandomStream(1), workers=4)
        second = samplers.draw_parallel(self.draw, 100, RandomStream(1), workers=4)
        np.testing.assert_array_equal(first, second)

    def test_worker_streams(self):
        rng = RandomStream(1)
        values = samplers.draw_parallel(self.draw, 4, rng, workers=2)
        expected = np.concatenate([rng.derive('worker', 0).uniform(2),
                                   rng.derive('worker', 1).uniform(2)])
        np.testing.assert_array_equal(values, expected)

    def test_more_workers_than_draws(self):
        values = samplers.draw_parallel(self.draw, 2, RandomStream(1), workers=8)
        assert len(values) == 2

    def test_error_raised(self):
        def draw(count, stream):
            raise NumericalFailure("no way")

        with pytest.raises(NumericalFailure):
            samplers.draw_parallel(draw, 10, RandomStream(1), workers=2)
