# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
from dataclasses import dataclass

import numpy as np
import pandas as pd

from q2_ctre.mittag_leffler import MLParams, ml_isf, ml_pdf, ml_sf

CURVE_COLUMNS = [
    "t",
    "density",
    "conditional_density",
    "conditional_survival",
    "hazard",
]
QUANTILE_COLUMNS = ["q", "t"]
HAZARD_COLUMNS = ["beta", "t", "hazard"]
DEFAULT_QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)


@dataclass(frozen=True)
class PredictiveState:
    """Fitted law of the next crossing time plus the time ``t0`` already waited.

    ``params`` must already carry the threshold-adjusted scale.
    """

    params: MLParams
    t0: float = 0.0

    def __post_init__(self):
        t0 = float(self.t0)
        if not (np.isfinite(t0) and t0 >= 0):
            raise ValueError(f"t0 must be finite and non-negative, got {t0}.")
        object.__setattr__(self, "t0", t0)

    @property
    def memoryless(self):
        return self.params.beta == 1.0 or self.t0 == 0.0

    def survival_at_t0(self):
        survival = ml_sf(self.t0, self.params)
        if not survival > 0:
            raise FloatingPointError(
                f"The survival probability at t0 = {self.t0} underflows; the "
                "conditional law cannot be formed."
            )
        return survival


@dataclass(frozen=True, eq=False)
class ForecastTable:
    curve: pd.DataFrame
    quantiles: pd.DataFrame


def _positive(t, name="t"):
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError(f"{name} must be strictly positive.")
    return arr


def conditional_density(state, t):
    """Density of the remaining waiting time given no crossing during t0."""
    _positive(t)
    if state.memoryless:
        return ml_pdf(t, state.params)
    return ml_pdf(np.asarray(t, dtype=float) + state.t0, state.params) / (
        state.survival_at_t0()
    )


def conditional_survival(state, t):
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise ValueError("t must be non-negative.")
    if state.memoryless:
        return ml_sf(t, state.params)
    values = ml_sf(arr + state.t0, state.params) / state.survival_at_t0()
    return values if np.ndim(t) else float(values)


def conditional_survival_quantile(state, q):
    """Smallest t with P[T <= t0 + t | T > t0] >= q."""
    q_arr = np.atleast_1d(np.asarray(q, dtype=float))
    if np.any(np.isnan(q_arr)) or np.any(q_arr < 0) or np.any(q_arr >= 1):
        raise ValueError("Quantile levels must satisfy 0 <= q < 1.")
    p = state.params
    if p.beta == 1.0:
        out = -p.sigma * np.log1p(-q_arr)
    else:
        out = np.zeros_like(q_arr)
        positive = q_arr > 0
        if positive.any():
            target = (1.0 - q_arr[positive]) * state.survival_at_t0()
            out[positive] = np.maximum(
                np.atleast_1d(ml_isf(target, p)) - state.t0, 0.0
            )
    return out.reshape(np.shape(q)) if np.ndim(q) else float(out[0])


def hazard_rate(params, t):
    """Crossing risk per unit time f(t) / S(t)."""
    arr = _positive(t)
    if params.beta == 1.0:
        rate = np.full(arr.shape, 1.0 / params.sigma)
        return rate if np.ndim(t) else float(rate)
    survival = np.asarray(ml_sf(arr, params))
    if np.any(survival <= 0):
        raise FloatingPointError(
            "The survival probability underflows; the hazard rate is not "
            "representable at these times."
        )
    rate = np.asarray(ml_pdf(arr, params)) / survival
    return rate if np.ndim(t) else float(rate)


def hazard_curves(betas, sigma, t):
    """Long-format hazard table for several tail parameters at a common scale."""
    t = _positive(np.atleast_1d(t))
    frames = [
        pd.DataFrame(
            {"beta": beta, "t": t, "hazard": hazard_rate(MLParams(beta, sigma), t)}
        )
        for beta in betas
    ]
    return pd.concat(frames, ignore_index=True)[HAZARD_COLUMNS]


def default_grid(params, n_points=61):
    return params.sigma * np.logspace(-3, 3, n_points)


def forecast_table(state, t=None, quantiles=DEFAULT_QUANTILES):
    """Unconditional and conditional curves on a grid plus conditional quantiles.

    The ``hazard`` column is the hazard of the full waiting time at t0 + t.
    """
    t = default_grid(state.params) if t is None else np.atleast_1d(t)
    t = _positive(t)
    curve = pd.DataFrame(
        {
            "t": t,
            "density": ml_pdf(t, state.params),
            "conditional_density": conditional_density(state, t),
            "conditional_survival": conditional_survival(state, t),
            "hazard": hazard_rate(state.params, t + state.t0),
        }
    )
    q = np.asarray(quantiles, dtype=float)
    table = pd.DataFrame({"q": q, "t": conditional_survival_quantile(state, q)})
    return ForecastTable(curve=curve[CURVE_COLUMNS], quantiles=table)
