# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
import numpy as np
from numpy.testing import assert_array_equal
from qiime2.plugin.testing import TestPluginBase
from scipy import stats

from q2_ctre.exceedances import exceedances_at_order
from q2_ctre.mittag_leffler import MLParams, ml_cdf
from q2_ctre.simulation import SimConfig, simulate_mrp, stable_rand


class TestStableRand(TestPluginBase):
    package = "q2_ctre.tests"

    def test_laplace_transform(self):
        beta = 0.8
        draws = stable_rand(beta, 1_000_000, seed=1)
        for s in (0.5, 1.0, 2.0):
            values = np.exp(-s * draws)
            se = values.std(ddof=1) / np.sqrt(values.size)
            self.assertLess(abs(values.mean() - np.exp(-(s**beta))), 3 * se)

    def test_sum_stability(self):
        beta = 0.8
        sums = stable_rand(beta, 100 * 10_000, seed=2).reshape(10_000, 100)
        normalized = sums.sum(axis=1) / 100 ** (1 / beta)
        fresh = stable_rand(beta, 10_000, seed=3)
        self.assertGreater(stats.ks_2samp(normalized, fresh).pvalue, 0.01)

    def test_draws_are_positive(self):
        for beta in (0.1, 0.5, 0.95):
            self.assertTrue(np.all(stable_rand(beta, 10_000, seed=4) > 0))

    def test_power_law_tail(self):
        beta = 0.8
        draws = np.sort(stable_rand(beta, 100_000, seed=5))
        survival = 1.0 - np.arange(1, draws.size + 1) / (draws.size + 1)
        upper = (survival >= 1e-3) & (survival <= 1e-2)
        slope = stats.linregress(np.log(draws[upper]), np.log(survival[upper])).slope
        self.assertAlmostEqual(slope, -beta, delta=0.1)

    def test_deterministic(self):
        assert_array_equal(
            stable_rand(0.6, 100, seed=7), stable_rand(0.6, 100, seed=7)
        )

    def test_beta_out_of_range(self):
        for beta in (0.0, 1.0, 1.5):
            with self.assertRaisesRegex(ValueError, "beta"):
                stable_rand(beta, 10)


class TestSimulateMRP(TestPluginBase):
    package = "q2_ctre.tests"

    def test_reproducible(self):
        cfg = SimConfig(beta=0.8, n=1000, seed=3)
        first, second = simulate_mrp(cfg), simulate_mrp(cfg)
        assert_array_equal(first.times, second.times)
        assert_array_equal(first.magnitudes, second.magnitudes)

    def test_magnitude_law_leaves_durations_unchanged(self):
        expon = simulate_mrp(SimConfig(beta=0.8, n=2000, seed=9))
        gumbel = simulate_mrp(
            SimConfig(beta=0.8, n=2000, seed=9, magnitude_law="gumbel")
        )
        assert_array_equal(expon.times, gumbel.times)
        self.assertFalse(np.array_equal(expon.magnitudes, gumbel.magnitudes))
        for k in (10, 50, 200):
            assert_array_equal(
                exceedances_at_order(expon, k).durations,
                exceedances_at_order(gumbel, k).durations,
            )

    def test_exponential_waiting_times(self):
        series = simulate_mrp(
            SimConfig(n=20_000, seed=1, waiting_law="exponential", beta=1.0)
        )
        self.assertAlmostEqual(series.waiting_times.mean(), 1.0, delta=0.03)

    def test_exceedance_times_follow_the_limit_law(self):
        beta, n, k = 0.8, 10_000, 100
        params = MLParams(beta, (n / k) ** (1 / beta))
        passed = 0
        for seed in range(50):
            series = simulate_mrp(SimConfig(beta=beta, n=n, seed=seed))
            durations = exceedances_at_order(series, k).durations
            self.assertEqual(durations.size, k - 1)
            result = stats.kstest(durations, lambda t: ml_cdf(t, params))
            passed += result.pvalue > 0.01
        self.assertGreaterEqual(passed, 45)

    def test_config_validation(self):
        with self.assertRaisesRegex(ValueError, "beta"):
            SimConfig(beta=1.0)
        with self.assertRaisesRegex(ValueError, "At least 2 events"):
            SimConfig(n=1)
        with self.assertRaisesRegex(ValueError, "magnitude law"):
            SimConfig(magnitude_law="pareto")
        with self.assertRaisesRegex(ValueError, "waiting-time law"):
            SimConfig(waiting_law="weibull")
