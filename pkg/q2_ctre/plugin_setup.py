# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
import importlib

from qiime2.plugin import Bool, Choices, Citations, Float, Int, Plugin, Range, Str

from q2_ctre import __version__
from q2_ctre.estimators import METHODS
from q2_ctre.pipeline import (
    diagnose_exceedances,
    fit_exceedances,
    predict_crossing,
    scan_thresholds,
    simulate_events,
)
from q2_ctre.simulation import MAGNITUDE_LAWS, WAITING_LAWS
from q2_ctre.types._format import (
    AutocorrelationFormat,
    CopulaFormat,
    CrossingForecastDirFmt,
    CTREDiagnosticsDirFmt,
    EventSeriesDirFmt,
    EventSeriesFormat,
    FitReportDirFmt,
    FitReportFormat,
    ForecastCurveFormat,
    ForecastQuantilesFormat,
    QQFormat,
    StabilityScanDirFmt,
    StabilityScanFormat,
)
from q2_ctre.types._type import (
    CrossingForecast,
    CTREDiagnostics,
    ExceedanceStability,
    MarkedRenewalEvents,
    MittagLefflerFit,
)

citations = Citations.load("citations.bib", package="q2_ctre")

plugin = Plugin(
    name="ctre",
    version=__version__,
    website="https://github.com/q2-ctre/q2-ctre",
    package="q2_ctre",
    description="Peaks-over-threshold analysis of bursty event series: "
    "Mittag-Leffler inference for the times between threshold crossings, "
    "stability plots, model diagnostics and forecasts of the next crossing.",
    short_description="Bursty peaks-over-threshold analysis.",
    citations=[],
)

_threshold_params = {"k": Int % Range(1, None), "ell": Float}
_threshold_descriptions = {
    "k": "Place the threshold at the k-th largest magnitude.",
    "ell": "Threshold magnitude. Mutually exclusive with k.",
}

plugin.methods.register_function(
    function=simulate_events,
    inputs={},
    parameters={
        "beta": Float % Range(0, 1, inclusive_start=False, inclusive_end=False),
        "n_events": Int % Range(2, None),
        "magnitude_law": Str % Choices(list(MAGNITUDE_LAWS)),
        "waiting_law": Str % Choices(list(WAITING_LAWS)),
        "seed": Int % Range(0, None),
    },
    outputs=[("events", MarkedRenewalEvents)],
    input_descriptions={},
    parameter_descriptions={
        "beta": "Tail parameter of the stable waiting times.",
        "n_events": "Number of events to simulate.",
        "magnitude_law": "Law of the event magnitudes.",
        "waiting_law": "Law of the waiting times. 'exponential' gives the "
        "Poisson null model.",
        "seed": "Seed of the random number generator.",
    },
    output_descriptions={"events": "Simulated marked renewal process."},
    name="Simulate a bursty event series.",
    description="Simulate an uncoupled marked renewal process with totally "
    "skewed stable waiting times and i.i.d. magnitudes.",
    citations=[citations["kanter1975stable"]],
)

plugin.methods.register_function(
    function=fit_exceedances,
    inputs={"events": MarkedRenewalEvents},
    parameters={
        **_threshold_params,
        "method": Str % Choices(list(METHODS)),
        "drop_first": Bool,
    },
    outputs=[("fit_report", MittagLefflerFit)],
    input_descriptions={"events": "Event series to analyse."},
    parameter_descriptions={
        **_threshold_descriptions,
        "method": "Estimator of the Mittag-Leffler parameters.",
        "drop_first": "Discard the duration measured from the start of the "
        "observation.",
    },
    output_descriptions={
        "fit_report": "Parameter estimates with 95% intervals and the "
        "likelihood-ratio test against the exponential law."
    },
    name="Fit the inter-exceedance law at one threshold.",
    description="Fit a Mittag-Leffler law to the times between threshold "
    "crossings and test it against the exponential null model. The report "
    "also holds the QQ-estimate of the magnitude tail exponent.",
    citations=[
        citations["cahoy2013estimation"],
        citations["haubold2011mittag"],
        citations["kratz1996qq"],
    ],
)

plugin.methods.register_function(
    function=scan_thresholds,
    inputs={"events": MarkedRenewalEvents},
    parameters={
        "k_min": Int % Range(3, None),
        "k_max": Int % Range(4, None),
        "method": Str % Choices(list(METHODS)),
        "verbose": Bool,
    },
    outputs=[("scan", ExceedanceStability)],
    input_descriptions={"events": "Event series to analyse."},
    parameter_descriptions={
        "k_min": "Smallest order-statistic index of the scan.",
        "k_max": "Largest order-statistic index of the scan. Defaults to one "
        "twentieth of the number of events.",
        "method": "Estimator used for each threshold.",
        "verbose": "Display progress messages.",
    },
    output_descriptions={
        "scan": "Tail parameter and scale estimates per threshold index."
    },
    name="Stability scan over order-statistic thresholds.",
    description="Estimate the Mittag-Leffler parameters of the inter-exceedance "
    "times for a range of thresholds placed at the largest order statistics.",
    citations=[citations["cahoy2013estimation"]],
)

plugin.methods.register_function(
    function=diagnose_exceedances,
    inputs={"events": MarkedRenewalEvents},
    parameters={
        **_threshold_params,
        "max_lag": Int % Range(1, None),
        "n_permutations": Int % Range(1, None),
        "seed": Int % Range(0, None),
    },
    outputs=[("diagnostics", CTREDiagnostics)],
    input_descriptions={"events": "Event series to analyse."},
    parameter_descriptions={
        **_threshold_descriptions,
        "max_lag": "Largest autocorrelation lag.",
        "n_permutations": "Number of reshuffled series for the permutation band.",
        "seed": "Seed of the reshuffling.",
    },
    output_descriptions={
        "diagnostics": "Autocorrelation, empirical copula and QQ plot data."
    },
    name="Diagnose the model assumptions.",
    description="Produce plot data checking that the inter-exceedance times "
    "and exceedances are i.i.d., mutually independent, and that the times "
    "follow a Mittag-Leffler law. Defaults to the 200th largest magnitude as "
    "threshold.",
    citations=[],
)

plugin.methods.register_function(
    function=predict_crossing,
    inputs={"scan": ExceedanceStability},
    parameters={
        "k": Int % Range(1, None),
        "t0": Float % Range(0, None),
        "window_lo": Int % Range(1, None),
        "window_hi": Int % Range(1, None),
        "verbose": Bool,
    },
    outputs=[("forecast", CrossingForecast)],
    input_descriptions={"scan": "Stability scan of the event series."},
    parameter_descriptions={
        "k": "Order-statistic index of the threshold to forecast.",
        "t0": "Time already elapsed since the last crossing.",
        "window_lo": "Lower end of the stable window of the scan. Defaults to "
        "the middle of the scanned range.",
        "window_hi": "Upper end of the stable window of the scan.",
        "verbose": "Display progress messages.",
    },
    output_descriptions={
        "forecast": "Predictive density, survival and hazard of the time to the "
        "next crossing, and its quantiles."
    },
    name="Forecast the next threshold crossing.",
    description="Forecast the time until the next crossing of the threshold, "
    "conditional on the time already elapsed.",
    citations=[citations["trefethen2006talbot"]],
)

plugin.register_semantic_types(
    MarkedRenewalEvents,
    ExceedanceStability,
    MittagLefflerFit,
    CTREDiagnostics,
    CrossingForecast,
)
plugin.register_semantic_type_to_format(
    MarkedRenewalEvents, artifact_format=EventSeriesDirFmt
)
plugin.register_semantic_type_to_format(
    ExceedanceStability, artifact_format=StabilityScanDirFmt
)
plugin.register_semantic_type_to_format(
    MittagLefflerFit, artifact_format=FitReportDirFmt
)
plugin.register_semantic_type_to_format(
    CTREDiagnostics, artifact_format=CTREDiagnosticsDirFmt
)
plugin.register_semantic_type_to_format(
    CrossingForecast, artifact_format=CrossingForecastDirFmt
)

plugin.register_formats(
    EventSeriesFormat,
    EventSeriesDirFmt,
    StabilityScanFormat,
    StabilityScanDirFmt,
    FitReportFormat,
    FitReportDirFmt,
    AutocorrelationFormat,
    CopulaFormat,
    QQFormat,
    CTREDiagnosticsDirFmt,
    ForecastCurveFormat,
    ForecastQuantilesFormat,
    CrossingForecastDirFmt,
)

importlib.import_module("q2_ctre.types._transformer")
