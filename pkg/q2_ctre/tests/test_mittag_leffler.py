# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
import math

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from qiime2.plugin.testing import TestPluginBase
from scipy import stats
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import erfcx, gamma

from q2_ctre.mittag_leffler import (
    MLFArgs,
    MLParams,
    ml_cdf,
    ml_isf,
    ml_logpdf,
    ml_pdf,
    ml_quantile,
    ml_rand,
    ml_sf,
    mlf,
    mlf_e,
)


def _series_oracle(alpha, btilde, x, terms=80):
    return sum((-x) ** k / math.gamma(alpha * k + btilde) for k in range(terms))


class TestMittagLefflerFunction(TestPluginBase):
    package = "q2_ctre.tests"

    def test_known_values(self):
        self.assertEqual(mlf_e(MLFArgs(0.8, 1.0, 0.0)), 1.0)
        self.assertAlmostEqual(
            mlf_e(MLFArgs(1.0, 1.0, -1.0)), np.exp(-1), places=14
        )
        self.assertAlmostEqual(
            mlf_e(MLFArgs(0.5, 1.0, -1.0)), 0.4275835762, places=9
        )
        self.assertAlmostEqual(
            mlf_e(MLFArgs(0.8, 0.8, 0.0)), 1 / gamma(0.8), places=14
        )

    def test_half_order_matches_erfcx(self):
        x = np.array([0.1, 1.0, 5.0, 10.0])
        assert_allclose(mlf(0.5, 1.0, x), erfcx(x), rtol=1e-8)

    def test_value_at_zero(self):
        for alpha, btilde in [(0.3, 0.5), (0.8, 1.0), (0.8, 1.8), (1.0, 2.5)]:
            self.assertAlmostEqual(mlf(alpha, btilde, 0.0), 1 / gamma(btilde))

    def test_moderate_arguments_match_series(self):
        for x in (0.5, 1.0, 2.0, 3.0):
            self.assertAlmostEqual(
                mlf(0.8, 0.8, x) / _series_oracle(0.8, 0.8, x), 1.0, places=8
            )

    def test_monotone_in_argument(self):
        x = np.logspace(-3, 8, 200)
        for btilde in (0.8, 1.0, 1.8):
            values = mlf(0.8, btilde, x)
            self.assertTrue(np.all(np.diff(values) <= 0))
            self.assertTrue(np.all(values >= 0))

    def test_vectorized_shape(self):
        x = np.linspace(0, 20, 12).reshape(3, 4)
        self.assertEqual(mlf(0.7, 1.0, x).shape, (3, 4))
        self.assertIsInstance(mlf(0.7, 1.0, 2.0), float)

    def test_positive_argument_rejected(self):
        with self.assertRaisesRegex(ValueError, "non-positive"):
            mlf_e(MLFArgs(0.8, 1.0, 0.5))

    def test_invalid_parameters(self):
        with self.assertRaisesRegex(ValueError, "alpha"):
            MLFArgs(1.5, 1.0, -1.0)
        with self.assertRaisesRegex(ValueError, "btilde"):
            MLFArgs(0.5, 0.0, -1.0)


class TestMittagLefflerDistribution(TestPluginBase):
    package = "q2_ctre.tests"

    def test_params_validation(self):
        with self.assertRaisesRegex(ValueError, "beta"):
            MLParams(0.0, 1.0)
        with self.assertRaisesRegex(ValueError, "beta"):
            MLParams(1.2, 1.0)
        with self.assertRaisesRegex(ValueError, "sigma"):
            MLParams(0.5, -1.0)

    def test_pdf_exponential_reduction(self):
        self.assertAlmostEqual(
            ml_pdf(0.5, MLParams(1.0, 1.0)), 0.6065306597, places=9
        )

    def test_pdf_matches_series_oracle(self):
        expected = _series_oracle(0.8, 0.8, 1.0)
        self.assertAlmostEqual(
            ml_pdf(1.0, MLParams(0.8, 1.0)) / expected, 1.0, places=8
        )

    def test_pdf_normalization(self):
        for beta in (0.5, 0.8, 0.95):
            p = MLParams(beta, 1.0)
            head, _ = quad(lambda t: ml_pdf(t, p), 0, 1, limit=200)
            tail, _ = quad(lambda t: ml_pdf(t, p), 1, np.inf, limit=200)
            self.assertAlmostEqual(head + tail, 1.0, delta=1e-4)

    def test_pdf_domain(self):
        with self.assertRaisesRegex(ValueError, "t > 0"):
            ml_pdf(0.0, MLParams(0.8, 1.0))

    def test_logpdf_matches_pdf(self):
        p = MLParams(0.7, 3.0)
        t = np.logspace(-2, 4, 25)
        assert_allclose(
            ml_logpdf(t, p), np.log(ml_pdf(t, p)), rtol=1e-10, atol=1e-12
        )

    def test_cdf_examples(self):
        self.assertAlmostEqual(
            ml_cdf(2.0, MLParams(1.0, 2.0)), 0.6321205588, places=9
        )
        self.assertEqual(ml_cdf(0.0, MLParams(0.8, 1.0)), 0.0)
        self.assertAlmostEqual(
            ml_cdf(1.0, MLParams(0.5, 1.0)), 0.5724164238, places=8
        )

    def test_cdf_exponential_reduction(self):
        t = np.logspace(-4, 2, 200)
        p = MLParams(1.0, 3.0)
        error = np.abs(ml_cdf(t, p) - (1 - np.exp(-t / 3.0)))
        self.assertLess(np.max(error), 1e-10)

    def test_cdf_derivative_is_pdf(self):
        t = np.logspace(-3, 3, 13) * 1.37
        for beta in (0.5, 0.8, 0.95):
            p = MLParams(beta, 2.0)
            h = 1e-5 * t
            slope = (ml_cdf(t + h, p) - ml_cdf(t - h, p)) / (2 * h)
            assert_allclose(slope, ml_pdf(t, p), rtol=1e-5)

    def test_cdf_monotone_and_limits(self):
        p = MLParams(0.6, 1.0)
        t = np.logspace(-6, 12, 300)
        values = ml_cdf(t, p)
        self.assertTrue(np.all(np.diff(values) >= 0))
        self.assertEqual(ml_cdf(np.inf, p), 1.0)

    def test_survival_is_complement(self):
        p = MLParams(0.8, 1.0)
        t = np.logspace(-3, 3, 31)
        assert_allclose(ml_sf(t, p) + ml_cdf(t, p), 1.0, atol=1e-12)

    def test_heavy_tail(self):
        for beta in (0.5, 0.8):
            t = 1e6
            scaled = ml_sf(t, MLParams(beta, 1.0)) * t**beta
            self.assertAlmostEqual(scaled * gamma(1 - beta), 1.0, delta=0.01)

    def test_negative_time(self):
        with self.assertRaisesRegex(ValueError, "t >= 0"):
            ml_cdf(-1.0, MLParams(0.8, 1.0))


class TestMittagLefflerQuantiles(TestPluginBase):
    package = "q2_ctre.tests"

    def test_quantile_examples(self):
        self.assertEqual(ml_quantile(0.0, MLParams(0.8, 1.0)), 0.0)
        self.assertAlmostEqual(
            ml_quantile(0.5, MLParams(1.0, 1.0)), np.log(2), places=12
        )

    def test_quantile_matches_bracketing_oracle(self):
        p = MLParams(0.8, 1.0)
        expected = brentq(lambda t: ml_cdf(t, p) - 0.9, 1e-3, 1e3, xtol=1e-14)
        self.assertAlmostEqual(ml_quantile(0.9, p) / expected, 1.0, places=9)

    def test_quantile_cdf_round_trip(self):
        q = np.concatenate(([0.0], np.linspace(1e-4, 0.999, 150)))
        for beta in (0.3, 0.6, 0.8, 0.95):
            p = MLParams(beta, 5.0)
            t = ml_quantile(q, p)
            self.assertLess(np.max(np.abs(ml_cdf(t, p) - q)), 1e-9)
            self.assertTrue(np.all(np.diff(t) > 0))

    def test_scale_equivariance(self):
        q = np.array([0.01, 0.3, 0.5, 0.9, 0.99])
        assert_allclose(
            ml_quantile(q, MLParams(0.7, 42.0)),
            42.0 * ml_quantile(q, MLParams(0.7, 1.0)),
            rtol=1e-15,
        )

    def test_inverse_survival_deep_tail(self):
        p = MLParams(0.8, 1.0)
        s = np.array([0.9, 0.5, 1e-3, 1e-6, 1e-12])
        assert_allclose(ml_sf(ml_isf(s, p), p), s, rtol=1e-9)

    def test_quantile_range(self):
        for q in (-0.1, 1.0):
            with self.assertRaisesRegex(ValueError, "0 <= q < 1"):
                ml_quantile(q, MLParams(0.8, 1.0))


class TestMittagLefflerRandom(TestPluginBase):
    package = "q2_ctre.tests"

    def test_deterministic(self):
        p = MLParams(0.8, 1.0)
        assert_array_equal(ml_rand(p, 50, seed=3), ml_rand(p, 50, seed=3))

    def test_exponential_reduction(self):
        draws = ml_rand(MLParams(1.0, 1.0), 10_000, seed=1)
        self.assertLess(stats.kstest(draws, "expon").statistic, 0.02)

    def test_matches_cdf(self):
        p = MLParams(0.8, 1.0)
        draws = ml_rand(p, 10_000, seed=2)
        self.assertLess(stats.kstest(draws, lambda t: ml_cdf(t, p)).statistic, 0.02)

    def test_invalid_size(self):
        with self.assertRaisesRegex(ValueError, "at least 1"):
            ml_rand(MLParams(0.8, 1.0), 0)
