# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
from dataclasses import dataclass

import numpy as np
from scipy import stats

from q2_ctre.events import EventSeries
from q2_ctre.utils import as_rng

MAGNITUDE_LAWS = {"exponential": stats.expon, "gumbel": stats.gumbel_r}
WAITING_LAWS = ("stable", "exponential")


@dataclass(frozen=True)
class SimConfig:
    beta: float = 0.8
    n: int = 10000
    magnitude_law: str = "exponential"
    seed: int = 0
    waiting_law: str = "stable"

    def __post_init__(self):
        if self.waiting_law not in WAITING_LAWS:
            raise ValueError(
                f"Unknown waiting-time law {self.waiting_law!r}; choose one of "
                f"{WAITING_LAWS}."
            )
        if self.magnitude_law not in MAGNITUDE_LAWS:
            raise ValueError(
                f"Unknown magnitude law {self.magnitude_law!r}; choose one of "
                f"{tuple(MAGNITUDE_LAWS)}."
            )
        if self.waiting_law == "stable" and not 0 < self.beta < 1:
            raise ValueError(
                f"Stable waiting times need 0 < beta < 1, got {self.beta}."
            )
        if int(self.n) < 2:
            raise ValueError(f"At least 2 events are needed, got n = {self.n}.")


def stable_rand(beta, n, seed=None):
    """Totally skewed beta-stable draws D with E[exp(-sD)] = exp(-s**beta).

    Uses Kanter's representation with U uniform on (0, pi) and E
    unit-exponential.
    """
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0, 1) for stable draws, got {beta}.")
    rng = as_rng(seed)
    u = np.pi * np.maximum(rng.random(int(n)), np.finfo(float).tiny)
    e = rng.standard_exponential(int(n))
    ratio = np.sin(beta * u) / np.power(np.sin(u), 1.0 / beta)
    return ratio * np.power(np.sin((1.0 - beta) * u) / e, (1.0 - beta) / beta)


def simulate_mrp(cfg):
    """Simulate an uncoupled marked renewal process.

    Waiting times and magnitudes come from independent child streams of
    ``cfg.seed``, so changing the magnitude law leaves the event times and
    the magnitude ranks untouched.
    """
    wait_seq, magnitude_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    wait_rng = np.random.default_rng(wait_seq)
    if cfg.waiting_law == "stable":
        waits = stable_rand(cfg.beta, cfg.n, wait_rng)
    else:
        waits = wait_rng.standard_exponential(int(cfg.n))

    u = np.random.default_rng(magnitude_seq).uniform(
        np.nextafter(0.0, 1.0), 1.0, int(cfg.n)
    )
    magnitudes = MAGNITUDE_LAWS[cfg.magnitude_law].ppf(u)
    return EventSeries(times=np.cumsum(waits), magnitudes=magnitudes, origin=0.0)
