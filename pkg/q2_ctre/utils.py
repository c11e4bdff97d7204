# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
import json

import numpy as np
import pandas as pd

VERBOSE_BANNER = (
    "Running a numerical step that may take a while. "
    "Progress messages are printed to stdout.\n"
    "The step being run is below."
)

# Analysis tables are written at this precision; event files are not.
FLOAT_FORMAT = "%.10g"
SIGNIFICANT_DIGITS = 10


def announce(step, details=None, verbose=True):
    if verbose:
        print(VERBOSE_BANNER)
        print("\nStep:", end=" ")
        print(step if details is None else f"{step} ({details})", end="\n\n")


def as_rng(seed=None):
    """Return a numpy Generator for an int seed, a SeedSequence or a Generator."""
    return np.random.default_rng(seed)


def positive_array(values, name="values", min_size=1):
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size < min_size:
        raise ValueError(
            f"{name} must contain at least {min_size} value(s), got {arr.size}."
        )
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError(f"All {name} must be finite and strictly positive.")
    return arr


def write_table(frame, path, fmt="csv"):
    """Write an analysis table at 10 significant digits."""
    if fmt == "csv":
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    elif fmt == "json":
        records = json.loads(
            frame.to_json(orient="records", double_precision=SIGNIFICANT_DIGITS)
        )
        with open(path, "w") as fh:
            json.dump(records, fh, indent=2)
    else:
        raise ValueError(f"Unknown table format {fmt!r}; use 'csv' or 'json'.")


def read_table(path):
    if str(path).endswith(".json"):
        return pd.read_json(path, orient="records")
    return pd.read_csv(path)


def round_significant(value, digits=SIGNIFICANT_DIGITS):
    """Round a float (or nan) to a fixed number of significant digits."""
    value = float(value)
    if not np.isfinite(value) or value == 0:
        return value
    return float(f"{value:.{digits}g}")
