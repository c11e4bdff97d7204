# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd
from scipy import stats

from q2_ctre.estimators import METHODS, fit
from q2_ctre.events import EventSeries
from q2_ctre.mittag_leffler import MLParams
from q2_ctre.utils import announce

__all__ = [
    "EventSeries",
    "ExceedanceSeries",
    "StabilityRow",
    "StabilityScan",
    "StableParams",
    "SCAN_COLUMNS",
    "extract_exceedances",
    "rethreshold",
    "order_threshold",
    "exceedances_at_order",
    "stability_scan",
    "select_stable_params",
    "fitted_distribution_at",
    "scaling_exponent",
]

SCAN_COLUMNS = [
    "k",
    "ell",
    "beta_hat",
    "beta_lo",
    "beta_hi",
    "sigma_hat",
    "sigma_norm",
    "sigma_lo",
    "sigma_hi",
    "status",
]

_Z95 = stats.norm.ppf(0.975)


@dataclass(frozen=True, eq=False)
class ExceedanceSeries:
    """Inter-exceedance durations and exceedance sizes above ``threshold``.

    ``times`` holds the crossing time closing each duration; ``k`` is the
    order-statistic index of the threshold when it was chosen that way.
    """

    threshold: float
    durations: np.ndarray
    excesses: np.ndarray
    times: np.ndarray
    p_hat: float
    origin: float = 0.0
    k: int = None
    ties: int = 0
    drop_first: bool = False

    @property
    def m(self):
        return int(self.durations.size)

    def to_frame(self):
        return pd.DataFrame(
            {
                "time": self.times,
                "duration": self.durations,
                "excess": self.excesses,
            }
        )


def extract_exceedances(series, ell, drop_first=False, k=None):
    """Durations between strict exceedances of ``ell`` and the excess sizes.

    The first duration runs from the series origin to the first crossing; a
    crossing exactly at the origin only serves as that reference point. With
    ``drop_first`` the duration measured from the origin is discarded.

    When ``k`` names the order statistic that defines ``ell``, that event is
    not reported as a tie; only further magnitudes equal to ``ell`` are.
    """
    if not isinstance(series, EventSeries):
        raise ValueError("extract_exceedances expects an EventSeries.")
    ell = float(ell)
    crossed = series.magnitudes > ell
    n_crossings = int(crossed.sum())
    if n_crossings == 0:
        raise ValueError(
            f"No event exceeds the threshold {ell} (sample maximum "
            f"{series.magnitudes.max()})."
        )

    times = series.times[crossed]
    excesses = series.magnitudes[crossed] - ell
    durations = np.diff(np.concatenate(([series.origin], times)))
    keep = durations > 0
    if drop_first and keep[0]:
        keep[0] = False
    if not keep.any():
        raise ValueError(
            f"The threshold {ell} leaves no inter-exceedance duration to analyse."
        )

    ties = int(np.sum(series.magnitudes == ell))
    if k is not None:
        # the k-th order statistic itself sits on the threshold
        ties = max(ties - 1, 0)
    if ties:
        warnings.warn(
            f"{ties} event(s) equal the threshold {ell} and were not counted "
            "as crossings.",
            UserWarning,
        )
    return ExceedanceSeries(
        threshold=ell,
        durations=durations[keep],
        excesses=excesses[keep],
        times=times[keep],
        p_hat=n_crossings / series.n,
        origin=series.origin,
        k=k,
        ties=ties,
        drop_first=bool(drop_first),
    )


def rethreshold(exceedances, ell):
    """Thin an exceedance series at a higher threshold ``ell``.

    Gives the same durations and excesses as extracting at ``ell`` from the
    original event series.
    """
    if exceedances.drop_first:
        raise ValueError("Cannot re-threshold a series whose first duration was "
                         "dropped.")
    shift = float(ell) - exceedances.threshold
    if shift < 0:
        raise ValueError(
            f"The new threshold {ell} lies below the current threshold "
            f"{exceedances.threshold}."
        )
    crossed = exceedances.excesses > shift
    if not crossed.any():
        raise ValueError(f"No exceedance is above the new threshold {ell}.")
    times = exceedances.times[crossed]
    return ExceedanceSeries(
        threshold=float(ell),
        durations=np.diff(np.concatenate(([exceedances.origin], times))),
        excesses=exceedances.excesses[crossed] - shift,
        times=times,
        p_hat=exceedances.p_hat * crossed.sum() / exceedances.m,
        origin=exceedances.origin,
    )


def order_threshold(series, k):
    """The k-th largest magnitude."""
    k = int(k)
    if not 1 <= k <= series.n:
        raise ValueError(f"k must lie in [1, {series.n}], got {k}.")
    return float(np.sort(series.magnitudes)[::-1][k - 1])


def exceedances_at_order(series, k, drop_first=False):
    return extract_exceedances(
        series, order_threshold(series, k), drop_first=drop_first, k=int(k)
    )


@dataclass(frozen=True)
class StabilityRow:
    k: int
    ell: float
    beta_hat: float
    beta_lo: float
    beta_hi: float
    sigma_hat: float
    sigma_norm: float
    sigma_lo: float
    sigma_hi: float
    status: str = "ok"

    @property
    def ok(self):
        return np.isfinite(self.beta_hat) and np.isfinite(self.sigma_hat)


@dataclass(frozen=True)
class StabilityScan:
    rows: tuple
    k_min: int
    k_max: int
    method: str = "logmoment"

    def to_frame(self):
        return pd.DataFrame(
            [[getattr(row, c) for c in SCAN_COLUMNS] for row in self.rows],
            columns=SCAN_COLUMNS,
        )

    @classmethod
    def from_frame(cls, frame, method="logmoment"):
        missing = [c for c in SCAN_COLUMNS if c not in frame.columns]
        if missing:
            raise ValueError(f"Scan table is missing column(s): {missing}.")
        rows = tuple(
            StabilityRow(
                k=int(r["k"]),
                ell=float(r["ell"]),
                beta_hat=float(r["beta_hat"]),
                beta_lo=float(r["beta_lo"]),
                beta_hi=float(r["beta_hi"]),
                sigma_hat=float(r["sigma_hat"]),
                sigma_norm=float(r["sigma_norm"]),
                sigma_lo=float(r["sigma_lo"]),
                sigma_hi=float(r["sigma_hi"]),
                status=str(r["status"]),
            )
            for _, r in frame.iterrows()
        )
        if not rows:
            raise ValueError("Scan table has no rows.")
        return cls(rows=rows, k_min=rows[0].k, k_max=rows[-1].k, method=method)


class StableParams(NamedTuple):
    beta0: float
    sigma0: float
    beta_iqr: float
    sigma_iqr: float
    window: tuple


def _normalized_interval(k, ml_fit):
    sigma_norm = k ** (1.0 / ml_fit.params.beta) * ml_fit.params.sigma
    if ml_fit.cov is None or not np.all(np.isfinite(ml_fit.cov)):
        return sigma_norm, float("nan"), float("nan")
    d = np.log(k) / ml_fit.params.beta**2
    var = ml_fit.cov[1, 1] + d**2 * ml_fit.cov[0, 0] - 2 * d * ml_fit.cov[0, 1]
    if not var >= 0:
        return sigma_norm, float("nan"), float("nan")
    half = _Z95 * np.sqrt(var)
    return sigma_norm, sigma_norm * np.exp(-half), sigma_norm * np.exp(half)


def _failed_row(k, ell, message):
    nan = float("nan")
    return StabilityRow(k, ell, nan, nan, nan, nan, nan, nan, nan, f"error: {message}")


def _scan_row(series, k, method):
    ell = order_threshold(series, k)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            exc = extract_exceedances(series, ell, k=k)
            ml_fit = fit(exc.durations, method)
    except (ValueError, FloatingPointError) as e:
        return _failed_row(k, ell, e)

    status = "ok"
    if exc.ties:
        status = "ties"
    elif ml_fit.clamped:
        status = "clamped"
    elif method == "mle" and not ml_fit.converged:
        status = "not converged"

    sigma_norm, sigma_lo, sigma_hi = _normalized_interval(k, ml_fit)
    return StabilityRow(
        k=k,
        ell=ell,
        beta_hat=ml_fit.params.beta,
        beta_lo=float(ml_fit.ci_beta[0]),
        beta_hi=float(ml_fit.ci_beta[1]),
        sigma_hat=ml_fit.params.sigma,
        sigma_norm=float(sigma_norm),
        sigma_lo=float(sigma_lo),
        sigma_hi=float(sigma_hi),
        status=status,
    )


def stability_scan(series, k_min, k_max, method="logmoment", verbose=False):
    """Fit the inter-exceedance law at every order-statistic threshold.

    Row k uses the k-1 durations at the k-th largest magnitude. Row failures
    are recorded in the ``status`` column and do not stop the scan.
    """
    k_min, k_max = int(k_min), int(k_max)
    if not 3 <= k_min < k_max <= series.n:
        raise ValueError(
            f"Scan bounds must satisfy 3 <= k_min < k_max <= {series.n}, got "
            f"[{k_min}, {k_max}]."
        )
    if method not in METHODS:
        raise ValueError(f"Unknown fit method {method!r}; choose one of {METHODS}.")
    announce("stability scan", f"k = {k_min}..{k_max}, {method}", verbose)
    rows = tuple(_scan_row(series, k, method) for k in range(k_min, k_max + 1))
    return StabilityScan(rows=rows, k_min=k_min, k_max=k_max, method=method)


def default_window(scan):
    return (math.ceil((scan.k_min + scan.k_max) / 2), scan.k_max)


def _window_rows(scan, window):
    k_lo, k_hi = default_window(scan) if window is None else map(int, window)
    if not scan.k_min <= k_lo <= k_hi <= scan.k_max:
        raise ValueError(
            f"Window [{k_lo}, {k_hi}] is not inside the scanned range "
            f"[{scan.k_min}, {scan.k_max}]."
        )
    rows = [r for r in scan.rows if k_lo <= r.k <= k_hi and r.ok]
    if not rows:
        raise ValueError(f"No successful scan rows in the window [{k_lo}, {k_hi}].")
    return rows, (k_lo, k_hi)


def _iqr(values):
    q1, q3 = np.percentile(values, [25, 75])
    return float(q3 - q1)


def select_stable_params(scan, window=None):
    """Median tail parameter and normalized scale over a window of k.

    The scale is re-normalized with the common beta0, not the per-row
    estimates. Spreads are interquartile ranges over the window.
    """
    rows, window = _window_rows(scan, window)
    k = np.array([r.k for r in rows], dtype=float)
    beta = np.array([r.beta_hat for r in rows])
    sigma = np.array([r.sigma_hat for r in rows])
    beta0 = float(np.median(beta))
    normalized = k ** (1.0 / beta0) * sigma
    return StableParams(
        beta0=beta0,
        sigma0=float(np.median(normalized)),
        beta_iqr=_iqr(beta),
        sigma_iqr=_iqr(normalized),
        window=window,
    )


def fitted_distribution_at(beta0, sigma0, k):
    """ML law of the durations at the k-th order-statistic threshold."""
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}.")
    return MLParams(beta0, k ** (-1.0 / float(beta0)) * float(sigma0))


def scaling_exponent(scan, window=None):
    """Least-squares slope of ln sigma_hat(k) against ln k over a window.

    Close to -1/beta when the scale follows sigma ~ p**(-1/beta).
    """
    rows, _ = _window_rows(scan, window)
    if len(rows) < 2:
        raise ValueError("At least two scan rows are needed for a slope.")
    k = np.array([r.k for r in rows], dtype=float)
    sigma = np.array([r.sigma_hat for r in rows])
    return float(stats.linregress(np.log(k), np.log(sigma)).slope)
