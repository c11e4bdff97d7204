# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
import numpy as np
from numpy.testing import assert_allclose
from qiime2.plugin.testing import TestPluginBase
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gamma

from q2_ctre.forecast import (
    CURVE_COLUMNS,
    HAZARD_COLUMNS,
    QUANTILE_COLUMNS,
    PredictiveState,
    conditional_density,
    conditional_survival,
    conditional_survival_quantile,
    default_grid,
    forecast_table,
    hazard_curves,
    hazard_rate,
)
from q2_ctre.mittag_leffler import MLParams, ml_pdf


class TestConditionalLaw(TestPluginBase):
    package = "q2_ctre.tests"

    def test_density_is_normalized(self):
        for beta in (0.6, 0.8, 0.95):
            for t0 in (0.0, 1.0, 10.0):
                state = PredictiveState(MLParams(beta, 1.0), t0)
                head, _ = quad(lambda t: conditional_density(state, t), 0, 1,
                               limit=200)
                tail, _ = quad(lambda t: conditional_density(state, t), 1, np.inf,
                               limit=200)
                self.assertAlmostEqual(head + tail, 1.0, delta=1e-4)

    def test_no_elapsed_time_gives_unconditional_density(self):
        params = MLParams(0.7, 2.0)
        t = np.logspace(-2, 2, 9)
        assert_allclose(
            conditional_density(PredictiveState(params, 0.0), t), ml_pdf(t, params)
        )

    def test_exponential_is_memoryless(self):
        params = MLParams(1.0, 2.0)
        t = np.linspace(0.1, 10, 20)
        fresh = PredictiveState(params, 0.0)
        waited = PredictiveState(params, 7.5)
        self.assertTrue(waited.memoryless)
        assert_allclose(
            conditional_density(waited, t), conditional_density(fresh, t)
        )
        self.assertAlmostEqual(
            conditional_survival_quantile(waited, 0.5), 2.0 * np.log(2), places=12
        )

    def test_median_grows_with_elapsed_time(self):
        params = MLParams(0.8, 1.0)
        medians = [
            conditional_survival_quantile(PredictiveState(params, t0), 0.5)
            for t0 in (0.0, 1.0, 10.0, 100.0)
        ]
        self.assertTrue(np.all(np.diff(medians) > 0))

    def test_survival_grows_with_elapsed_time(self):
        params = MLParams(0.8, 1.0)
        t = np.array([0.5, 2.0, 20.0])
        previous = np.zeros_like(t)
        for t0 in (0.0, 1.0, 10.0, 100.0):
            current = conditional_survival(PredictiveState(params, t0), t)
            self.assertTrue(np.all(current > previous))
            previous = current

    def test_quantile_matches_bisection(self):
        state = PredictiveState(MLParams(0.8, 1.0), 10.0)
        expected = brentq(
            lambda t: conditional_survival(state, t) - 0.5, 1e-6, 1e6, xtol=1e-12
        )
        self.assertAlmostEqual(
            conditional_survival_quantile(state, 0.5) / expected, 1.0, places=6
        )

    def test_quantile_consistent_with_survival(self):
        state = PredictiveState(MLParams(0.6, 3.0), 4.0)
        q = np.array([0.1, 0.25, 0.5, 0.75, 0.9, 0.99])
        t = conditional_survival_quantile(state, q)
        assert_allclose(1 - conditional_survival(state, t), q, atol=1e-6)

    def test_zero_level(self):
        state = PredictiveState(MLParams(0.8, 1.0), 5.0)
        self.assertEqual(conditional_survival_quantile(state, 0.0), 0.0)

    def test_quantile_range(self):
        state = PredictiveState(MLParams(0.8, 1.0), 5.0)
        with self.assertRaisesRegex(ValueError, "0 <= q < 1"):
            conditional_survival_quantile(state, 1.0)

    def test_invalid_elapsed_time(self):
        with self.assertRaisesRegex(ValueError, "t0"):
            PredictiveState(MLParams(0.8, 1.0), -1.0)


class TestHazardRate(TestPluginBase):
    package = "q2_ctre.tests"

    def test_exponential_hazard_is_constant(self):
        assert_allclose(hazard_rate(MLParams(1.0, 2.0), [0.1, 1.0, 10.0]), 0.5)
        self.assertEqual(hazard_rate(MLParams(1.0, 2.0), 3.0), 0.5)

    def test_hazard_decreases(self):
        params = MLParams(0.8, 1.0)
        self.assertGreater(hazard_rate(params, 1.0), hazard_rate(params, 2.0))
        self.assertGreater(hazard_rate(params, 2.0), hazard_rate(params, 4.0))
        values = hazard_rate(params, np.logspace(-3, 3, 40))
        self.assertTrue(np.all(np.diff(values) < 0))

    def test_small_time_power_law(self):
        # h(t) ~ t**(beta - 1) / Gamma(beta) as t -> 0
        beta = 0.8
        params = MLParams(beta, 1.0)
        scaled = [hazard_rate(params, t) * t ** (1 - beta) for t in (1e-6, 1e-8)]
        self.assertAlmostEqual(scaled[0] / scaled[1], 1.0, delta=0.01)
        self.assertAlmostEqual(scaled[1], 1 / gamma(beta), delta=0.01)

    def test_curves(self):
        t = np.logspace(-1, 1, 5)
        frame = hazard_curves((0.6, 0.9, 1.0), 1.0, t)
        self.assertEqual(frame.columns.tolist(), HAZARD_COLUMNS)
        self.assertEqual(len(frame), 15)
        assert_allclose(frame.loc[frame["beta"] == 1.0, "hazard"], 1.0)

    def test_non_positive_time(self):
        with self.assertRaisesRegex(ValueError, "strictly positive"):
            hazard_rate(MLParams(0.8, 1.0), 0.0)


class TestForecastTable(TestPluginBase):
    package = "q2_ctre.tests"

    def test_default_table(self):
        state = PredictiveState(MLParams(0.8, 50.0), 20.0)
        table = forecast_table(state)
        self.assertEqual(table.curve.columns.tolist(), CURVE_COLUMNS)
        self.assertEqual(table.quantiles.columns.tolist(), QUANTILE_COLUMNS)
        assert_allclose(table.curve["t"], default_grid(state.params))
        self.assertEqual(len(table.curve), 61)
        self.assertAlmostEqual(table.curve["t"].iloc[0], 0.05)
        self.assertTrue(np.all(np.diff(table.quantiles["t"]) > 0))
        self.assertTrue(np.all(np.diff(table.curve["conditional_survival"]) < 0))

    def test_explicit_grid(self):
        state = PredictiveState(MLParams(0.7, 1.0), 0.0)
        table = forecast_table(state, t=[1.0, 2.0], quantiles=[0.5])
        assert_allclose(table.curve["density"], table.curve["conditional_density"])
        self.assertEqual(table.quantiles["q"].tolist(), [0.5])
