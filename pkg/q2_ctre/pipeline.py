# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
from dataclasses import dataclass

import numpy as np

from q2_ctre.diagnostics import DiagnosticReport, diagnose
from q2_ctre.estimators import MLFit, fit, lr_test_exponential, qq_tail_estimate
from q2_ctre.events import EventSeries
from q2_ctre.exceedances import (
    StabilityScan,
    extract_exceedances,
    fitted_distribution_at,
    order_threshold,
    select_stable_params,
    stability_scan,
)
from q2_ctre.forecast import ForecastTable, PredictiveState, forecast_table
from q2_ctre.simulation import SimConfig, simulate_mrp
from q2_ctre.utils import announce

DEFAULT_K_MIN = 10
DEFAULT_DIAGNOSTIC_K = 200
MIN_LRT_DURATIONS = 10


@dataclass(frozen=True)
class FitReport:
    k: int
    ell: float
    n_exceedances: int
    fit: MLFit
    lrt: dict = None
    ties: int = 0
    magnitude_tail: dict = None

    def to_dict(self):
        return {
            "k": int(self.k),
            "ell": float(self.ell),
            "n_exceedances": int(self.n_exceedances),
            "ties": int(self.ties),
            "fit": self.fit.to_dict(),
            "lrt": self.lrt,
            "magnitude_tail": self.magnitude_tail,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            k=int(data["k"]),
            ell=float(data["ell"]),
            n_exceedances=int(data["n_exceedances"]),
            fit=MLFit.from_dict(data["fit"]),
            lrt=data.get("lrt"),
            ties=int(data.get("ties", 0)),
            magnitude_tail=data.get("magnitude_tail"),
        )


def resolve_threshold(events, k=None, ell=None):
    """Return (k, ell) from exactly one of an order index or a magnitude level.

    A level ``ell`` maps to k = (number of magnitudes above ell) + 1.
    """
    if (k is None) == (ell is None):
        raise ValueError("Give exactly one of k or ell to define the threshold.")
    if k is not None:
        return int(k), order_threshold(events, k)
    ell = float(ell)
    return int(np.sum(events.magnitudes > ell)) + 1, ell


def default_k_max(n, k_min=DEFAULT_K_MIN):
    return min(max(k_min + 1, n // 20), n)


def simulate_events(
    beta: float = 0.8,
    n_events: int = 10000,
    magnitude_law: str = "exponential",
    waiting_law: str = "stable",
    seed: int = 0,
) -> EventSeries:
    config = SimConfig(
        beta=beta,
        n=n_events,
        magnitude_law=magnitude_law,
        seed=seed,
        waiting_law=waiting_law,
    )
    return simulate_mrp(config)


def fit_exceedances(
    events: EventSeries,
    k: int = None,
    ell: float = None,
    method: str = "logmoment",
    drop_first: bool = False,
) -> FitReport:
    k, ell = resolve_threshold(events, k, ell)
    exc = extract_exceedances(events, ell, drop_first=drop_first, k=k)
    ml_fit = fit(exc.durations, method)

    lrt = None
    if exc.m >= MIN_LRT_DURATIONS:
        lrt = lr_test_exponential(exc.durations).to_dict()
    return FitReport(
        k=k,
        ell=ell,
        n_exceedances=exc.m,
        fit=ml_fit,
        lrt=lrt,
        ties=exc.ties,
        magnitude_tail=magnitude_tail(events),
    )


def magnitude_tail(events):
    """QQ-estimate of the magnitude tail exponent on the full sample.

    Returns None when some magnitudes are not positive.
    """
    if events.n < 3 or np.any(events.magnitudes <= 0):
        return None
    try:
        estimate = qq_tail_estimate(events.magnitudes, [events.n])
    except ValueError:
        return None
    return {"alpha_hat": estimate.alpha_hat, "cutoff": estimate.cutoff}


def scan_thresholds(
    events: EventSeries,
    k_min: int = DEFAULT_K_MIN,
    k_max: int = None,
    method: str = "logmoment",
    verbose: bool = False,
) -> StabilityScan:
    if k_max is None:
        k_max = default_k_max(events.n, k_min)
    return stability_scan(events, k_min, k_max, method=method, verbose=verbose)


def diagnose_exceedances(
    events: EventSeries,
    k: int = None,
    ell: float = None,
    max_lag: int = 20,
    n_permutations: int = 200,
    seed: int = 0,
) -> DiagnosticReport:
    if k is None and ell is None:
        k = min(DEFAULT_DIAGNOSTIC_K, events.n)
    k, ell = resolve_threshold(events, k, ell)
    exc = extract_exceedances(events, ell, k=k)
    return diagnose(exc, max_lag=max_lag, n_permutations=n_permutations, seed=seed)


def predict_crossing(
    scan: StabilityScan,
    k: int,
    t0: float = 0.0,
    window_lo: int = None,
    window_hi: int = None,
    verbose: bool = False,
) -> ForecastTable:
    window = None
    if window_lo is not None or window_hi is not None:
        window = (
            scan.k_min if window_lo is None else window_lo,
            scan.k_max if window_hi is None else window_hi,
        )
    stable = select_stable_params(scan, window)
    params = fitted_distribution_at(stable.beta0, stable.sigma0, k)
    announce(
        "crossing forecast",
        f"beta0 = {stable.beta0:.4g}, sigma0 = {stable.sigma0:.4g}, k = {k}",
        verbose,
    )
    return forecast_table(PredictiveState(params, t0))
