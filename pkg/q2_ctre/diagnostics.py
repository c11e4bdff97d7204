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
from scipy.stats import rankdata
from statsmodels.tsa.stattools import acf

from q2_ctre.estimators import logmoment_fit
from q2_ctre.mittag_leffler import ml_quantile
from q2_ctre.utils import as_rng, positive_array

ACF_COLUMNS = [
    "lag",
    "acf_durations",
    "acf_excesses",
    "band_lo",
    "band_hi",
    "perm_durations_lo",
    "perm_durations_hi",
    "perm_excesses_lo",
    "perm_excesses_hi",
]
COPULA_COLUMNS = ["u", "v"]
QQ_COLUMNS = ["p", "theoretical", "empirical", "beta_used", "sigma_used"]


@dataclass(frozen=True, eq=False)
class QQPoints:
    theoretical: np.ndarray
    empirical: np.ndarray
    beta_used: float
    sigma_used: float

    def to_frame(self):
        m = self.empirical.size
        return pd.DataFrame(
            {
                "p": np.arange(1, m + 1) / (m + 1),
                "theoretical": self.theoretical,
                "empirical": self.empirical,
                "beta_used": self.beta_used,
                "sigma_used": self.sigma_used,
            }
        )


@dataclass(frozen=True, eq=False)
class DiagnosticReport:
    """Plot data for the i.i.d., uncoupledness and Mittag-Leffler checks."""

    acf_durations: np.ndarray
    acf_excesses: np.ndarray
    acf_band: float
    perm_band_durations: np.ndarray
    perm_band_excesses: np.ndarray
    copula: np.ndarray
    qq: QQPoints

    @property
    def max_lag(self):
        return self.acf_durations.size - 1

    def acf_frame(self):
        return pd.DataFrame(
            {
                "lag": np.arange(self.max_lag + 1),
                "acf_durations": self.acf_durations,
                "acf_excesses": self.acf_excesses,
                "band_lo": -self.acf_band,
                "band_hi": self.acf_band,
                "perm_durations_lo": self.perm_band_durations[:, 0],
                "perm_durations_hi": self.perm_band_durations[:, 1],
                "perm_excesses_lo": self.perm_band_excesses[:, 0],
                "perm_excesses_hi": self.perm_band_excesses[:, 1],
            }
        )

    def copula_frame(self):
        return pd.DataFrame(self.copula, columns=COPULA_COLUMNS)

    @classmethod
    def from_frames(cls, acf_frame, copula_frame, qq_frame):
        return cls(
            acf_durations=acf_frame["acf_durations"].to_numpy(float),
            acf_excesses=acf_frame["acf_excesses"].to_numpy(float),
            acf_band=float(acf_frame["band_hi"].iloc[0]),
            perm_band_durations=acf_frame[
                ["perm_durations_lo", "perm_durations_hi"]
            ].to_numpy(float),
            perm_band_excesses=acf_frame[
                ["perm_excesses_lo", "perm_excesses_hi"]
            ].to_numpy(float),
            copula=copula_frame[COPULA_COLUMNS].to_numpy(float),
            qq=QQPoints(
                theoretical=qq_frame["theoretical"].to_numpy(float),
                empirical=qq_frame["empirical"].to_numpy(float),
                beta_used=float(qq_frame["beta_used"].iloc[0]),
                sigma_used=float(qq_frame["sigma_used"].iloc[0]),
            ),
        )


def _log_values(values, max_lag):
    logs = np.log(positive_array(values, "values", min_size=2))
    max_lag = int(max_lag)
    if not 0 <= max_lag < logs.size:
        raise ValueError(
            f"max_lag must lie in [0, {logs.size - 1}], got {max_lag}."
        )
    if np.ptp(logs) == 0:
        raise ValueError("The autocorrelation of a constant series is undefined.")
    return logs, max_lag


def acf_log(values, max_lag=20):
    """Sample autocorrelation of ln(values) at lags 0..max_lag."""
    logs, max_lag = _log_values(values, max_lag)
    return acf(logs, nlags=max_lag, fft=False)


def acf_permutation_band(values, max_lag=20, n_permutations=200, seed=0,
                         level=0.95):
    """Pointwise ACF band of randomly reshuffled copies of ln(values).

    Returns an array of shape (max_lag + 1, 2) with the lower and upper
    quantiles per lag; lag 0 is (1, 1).
    """
    logs, max_lag = _log_values(values, max_lag)
    rng = as_rng(seed)
    draws = np.array(
        [acf(rng.permutation(logs), nlags=max_lag, fft=False)
         for _ in range(int(n_permutations))]
    )
    tail = 100 * (1 - level) / 2
    return np.percentile(draws, [tail, 100 - tail], axis=0).T


def white_noise_band(m):
    return 1.96 / np.sqrt(m)


def empirical_copula(x, y):
    """Pseudo-observations (rank(x)/(m+1), rank(y)/(m+1)), ties at average rank."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise ValueError(f"x and y differ in length ({x.size} vs {y.size}).")
    if x.size < 2:
        raise ValueError("At least 2 pairs are needed for an empirical copula.")
    m = x.size
    u = rankdata(x, method="average") / (m + 1)
    v = rankdata(y, method="average") / (m + 1)
    return np.column_stack((u, v))


def ml_qq_points(sample, params=None):
    """Mittag-Leffler QQ data at plotting positions i/(m+1).

    Uses the log-moment fit of ``sample`` unless ``params`` is given.
    """
    arr = positive_array(sample, "durations", min_size=3)
    if params is None:
        params = logmoment_fit(arr).params
    m = arr.size
    theoretical = ml_quantile(np.arange(1, m + 1) / (m + 1), params)
    return QQPoints(
        theoretical=np.asarray(theoretical),
        empirical=np.sort(arr),
        beta_used=params.beta,
        sigma_used=params.sigma,
    )


def diagnose(exceedances, max_lag=20, n_permutations=200, seed=0):
    m = exceedances.m
    if m < 3:
        raise ValueError(f"Diagnostics need at least 3 exceedances, got {m}.")
    max_lag = min(int(max_lag), m - 1)
    duration_seq, excess_seq = np.random.SeedSequence(seed).spawn(2)
    return DiagnosticReport(
        acf_durations=acf_log(exceedances.durations, max_lag),
        acf_excesses=acf_log(exceedances.excesses, max_lag),
        acf_band=white_noise_band(m),
        perm_band_durations=acf_permutation_band(
            exceedances.durations, max_lag, n_permutations, duration_seq
        ),
        perm_band_excesses=acf_permutation_band(
            exceedances.excesses, max_lag, n_permutations, excess_seq
        ),
        copula=empirical_copula(exceedances.durations, exceedances.excesses),
        qq=ml_qq_points(exceedances.durations),
    )
