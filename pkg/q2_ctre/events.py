# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd

EVENT_COLUMNS = ["time", "magnitude"]
TIME_FORMATS = ("auto", "numeric", "timestamp")
_MAX_REPORTED_LINES = 20


@dataclass(frozen=True, eq=False)
class EventSeries:
    """Observed sample path of a marked renewal process.

    ``times`` are strictly increasing event times in the units of the input,
    ``magnitudes`` the event marks. Durations are measured from ``origin``,
    the start of the observation.
    """

    times: np.ndarray
    magnitudes: np.ndarray
    origin: float = 0.0

    def __post_init__(self):
        times = np.array(self.times, dtype=float).ravel()
        magnitudes = np.array(self.magnitudes, dtype=float).ravel()
        if times.size != magnitudes.size:
            raise ValueError(
                f"times and magnitudes differ in length ({times.size} vs "
                f"{magnitudes.size})."
            )
        if times.size < 2:
            raise ValueError("An event series needs at least 2 events.")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(magnitudes))):
            raise ValueError("Event times and magnitudes must be finite.")
        if np.any(np.diff(times) <= 0):
            raise ValueError("Event times must be strictly increasing.")
        origin = float(self.origin)
        if origin > times[0]:
            raise ValueError(
                f"The origin ({origin}) lies after the first event ({times[0]})."
            )
        times.flags.writeable = False
        magnitudes.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "magnitudes", magnitudes)
        object.__setattr__(self, "origin", origin)

    @property
    def n(self):
        return int(self.times.size)

    @property
    def waiting_times(self):
        return np.diff(np.concatenate(([self.origin], self.times)))

    def to_frame(self):
        return pd.DataFrame({"time": self.times, "magnitude": self.magnitudes})


def _to_float(column):
    # Unparseable cells become nan; parseable ones go through float() so that
    # values written with full precision are read back exactly.
    parseable = pd.to_numeric(column, errors="coerce").notna()
    return column.str.strip().where(parseable).astype(float)


def _line_numbers(mask, lines):
    bad = lines[np.asarray(mask)].tolist()
    shown = ", ".join(str(line) for line in bad[:_MAX_REPORTED_LINES])
    if len(bad) > _MAX_REPORTED_LINES:
        shown += f", ... ({len(bad)} rows in total)"
    return shown


def _read_raw(path):
    try:
        raw = pd.read_csv(
            path,
            header=None,
            names=EVENT_COLUMNS,
            dtype=str,
            skip_blank_lines=False,
            skipinitialspace=True,
        )
    except pd.errors.EmptyDataError:
        raise ValueError(f"The event file {path} is empty.")
    except pd.errors.ParserError as e:
        raise ValueError(f"The event file {path} could not be parsed: {e}")
    raw["line"] = np.arange(1, len(raw) + 1)
    return raw[~(raw["time"].isna() & raw["magnitude"].isna())]


def parse_events(path, time_format="auto", origin=None):
    """Read a two-column ``time,magnitude`` CSV into an EventSeries.

    The header line is optional. Numeric times are used as given; ISO-like
    timestamps are converted to seconds since the first event. Unsorted rows
    are sorted and rows sharing a timestamp are merged keeping the larger
    magnitude, both with a warning.

    Without ``origin`` the series starts at min(0, first time). For absolute
    numeric clocks such as Unix seconds the first waiting time then spans the
    whole epoch offset; pass ``origin`` (in the units of the parsed times) to
    measure it from a known start instead.
    """
    if time_format not in TIME_FORMATS:
        raise ValueError(
            f"Unknown time format {time_format!r}; choose one of {TIME_FORMATS}."
        )
    raw = _read_raw(path)
    if raw.empty:
        raise ValueError(f"The event file {path} contains no rows.")

    first = raw.iloc[0]["magnitude"]
    if isinstance(first, str) and pd.isna(pd.to_numeric(first, errors="coerce")):
        raw = raw.iloc[1:]
    if len(raw) < 2:
        raise ValueError(
            f"The event file {path} holds fewer than 2 events ({len(raw)} found)."
        )

    if time_format == "auto":
        numeric = not pd.isna(pd.to_numeric(raw["time"].iloc[0], errors="coerce"))
        time_format = "numeric" if numeric else "timestamp"

    magnitudes = _to_float(raw["magnitude"])
    if time_format == "numeric":
        times = _to_float(raw["time"])
    else:
        stamps = pd.to_datetime(
            raw["time"].str.strip(), errors="coerce", format="ISO8601", utc=True
        )
        times = (stamps - stamps.min()) / pd.Timedelta(seconds=1)

    valid = np.isfinite(times.to_numpy(float)) & np.isfinite(
        magnitudes.to_numpy(float)
    )
    bad = ~valid
    if bad.any():
        raise ValueError(
            f"Unparseable rows in {path} at line(s) "
            f"{_line_numbers(bad, raw['line'].to_numpy())}."
        )

    table = pd.DataFrame(
        {"time": times.to_numpy(float), "magnitude": magnitudes.to_numpy(float)}
    )
    if not table["time"].is_monotonic_increasing:
        warnings.warn(
            f"Rows in {path} were not ordered by time and have been sorted.",
            UserWarning,
        )
        table = table.sort_values("time", kind="mergesort")

    merged = table.groupby("time", sort=True, as_index=False)["magnitude"].max()
    n_merged = len(table) - len(merged)
    if n_merged:
        warnings.warn(
            f"{n_merged} row(s) in {path} shared a timestamp with another row and "
            "were merged, keeping the larger magnitude.",
            UserWarning,
        )
    if len(merged) < 2:
        raise ValueError(
            f"The event file {path} holds fewer than 2 valid events "
            f"({len(merged)} found)."
        )

    times = merged["time"].to_numpy(float)
    return EventSeries(
        times=times,
        magnitudes=merged["magnitude"].to_numpy(float),
        origin=min(0.0, float(times[0])) if origin is None else float(origin),
    )


def write_events(series, path):
    # Full precision so that parse_events(write_events(s)) reproduces s bitwise.
    series.to_frame().to_csv(path, index=False)
