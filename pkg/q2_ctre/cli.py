# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
import argparse
import json
import os
import sys
from dataclasses import dataclass

from q2_ctre.estimators import METHODS
from q2_ctre.events import TIME_FORMATS, parse_events, write_events
from q2_ctre.pipeline import (
    DEFAULT_K_MIN,
    diagnose_exceedances,
    fit_exceedances,
    predict_crossing,
    scan_thresholds,
    simulate_events,
)
from q2_ctre.simulation import MAGNITUDE_LAWS, WAITING_LAWS
from q2_ctre.utils import write_table

COMMANDS = ("fit", "scan", "diagnose", "predict", "simulate")
OUTPUT_FORMATS = ("csv", "json")
_THRESHOLD_REQUIRED = ("fit", "predict")


@dataclass(frozen=True)
class RunConfig:
    command: str
    output: str
    input: str = None
    k_min: int = DEFAULT_K_MIN
    k_max: int = None
    k: int = None
    ell: float = None
    t0: float = 0.0
    method: str = "logmoment"
    seed: int = 0
    format: str = "csv"
    time_format: str = "auto"
    beta: float = 0.8
    n_events: int = 10000
    magnitude_law: str = "exponential"
    waiting_law: str = "stable"
    max_lag: int = 20
    window_lo: int = None
    window_hi: int = None
    drop_first: bool = False
    verbose: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(
                f"Unknown command {self.command!r}; choose one of {COMMANDS}."
            )
        if self.command != "simulate" and not self.input:
            raise ValueError(f"The {self.command} command needs --input.")
        if self.k is not None and self.ell is not None:
            raise ValueError("Give at most one of --k and --ell.")
        if self.command in _THRESHOLD_REQUIRED and self.k is None and self.ell is None:
            raise ValueError(f"The {self.command} command needs one of --k or --ell.")
        if self.command == "predict" and self.ell is not None:
            raise ValueError("The predict command takes the threshold as --k.")
        if self.method not in METHODS:
            raise ValueError(
                f"Unknown method {self.method!r}; choose one of {METHODS}."
            )
        if self.format not in OUTPUT_FORMATS:
            raise ValueError(
                f"Unknown format {self.format!r}; choose one of {OUTPUT_FORMATS}."
            )
        for name in ("k", "k_min", "k_max", "n_events", "max_lag"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"--{name.replace('_', '-')} must be positive.")
        if self.k_max is not None and not self.k_min < self.k_max:
            raise ValueError("--kmin must be smaller than --kmax.")
        if self.t0 < 0:
            raise ValueError("--t0 must be non-negative.")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ctre",
        description="Peaks-over-threshold analysis of bursty event series.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", help="CSV file with time,magnitude rows.")
    parser.add_argument("--output", required=True, help="Output directory.")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, default="csv")
    parser.add_argument("--time-format", choices=TIME_FORMATS, default="auto")
    parser.add_argument("--kmin", dest="k_min", type=int, default=DEFAULT_K_MIN)
    parser.add_argument("--kmax", dest="k_max", type=int)
    parser.add_argument("--k", type=int, help="Order-statistic threshold index.")
    parser.add_argument("--ell", type=float, help="Threshold magnitude.")
    parser.add_argument("--t0", type=float, default=0.0)
    parser.add_argument("--method", choices=METHODS, default="logmoment")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--beta", type=float, default=0.8)
    parser.add_argument("--n-events", type=int, default=10000)
    parser.add_argument(
        "--magnitude-law", choices=tuple(MAGNITUDE_LAWS), default="exponential"
    )
    parser.add_argument("--waiting-law", choices=WAITING_LAWS, default="stable")
    parser.add_argument("--max-lag", type=int, default=20)
    parser.add_argument("--window-lo", type=int)
    parser.add_argument("--window-hi", type=int)
    parser.add_argument("--drop-first", action="store_true")
    parser.add_argument("--verbose", action="store_true")
    return parser


def config_from_args(args):
    return RunConfig(**vars(args))


def _table_path(config, name):
    return os.path.join(config.output, f"{name}.{config.format}")


def run(config):
    """Execute one command and write its artifacts into ``config.output``."""
    os.makedirs(config.output, exist_ok=True)

    if config.command == "simulate":
        events = simulate_events(
            beta=config.beta,
            n_events=config.n_events,
            magnitude_law=config.magnitude_law,
            waiting_law=config.waiting_law,
            seed=config.seed,
        )
        write_events(events, os.path.join(config.output, "events.csv"))
        return 0

    events = parse_events(config.input, time_format=config.time_format)

    if config.command == "fit":
        report = fit_exceedances(
            events,
            k=config.k,
            ell=config.ell,
            method=config.method,
            drop_first=config.drop_first,
        )
        with open(os.path.join(config.output, "fit.json"), "w") as fh:
            json.dump(report.to_dict(), fh, indent=2)
    elif config.command == "scan":
        scan = scan_thresholds(
            events, config.k_min, config.k_max, config.method, config.verbose
        )
        write_table(scan.to_frame(), _table_path(config, "scan"), config.format)
    elif config.command == "diagnose":
        report = diagnose_exceedances(
            events,
            k=config.k,
            ell=config.ell,
            max_lag=config.max_lag,
            seed=config.seed,
        )
        write_table(report.acf_frame(), _table_path(config, "acf"), config.format)
        write_table(
            report.copula_frame(), _table_path(config, "copula"), config.format
        )
        write_table(report.qq.to_frame(), _table_path(config, "qq"), config.format)
    else:
        scan = scan_thresholds(
            events, config.k_min, config.k_max, config.method, config.verbose
        )
        table = predict_crossing(
            scan,
            config.k,
            t0=config.t0,
            window_lo=config.window_lo,
            window_hi=config.window_hi,
            verbose=config.verbose,
        )
        write_table(table.curve, _table_path(config, "forecast"), config.format)
        write_table(table.quantiles, _table_path(config, "quantiles"), config.format)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run(config_from_args(args))
    except (ValueError, RuntimeError, FloatingPointError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
