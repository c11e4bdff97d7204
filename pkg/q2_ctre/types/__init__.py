# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
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

__all__ = [
    "AutocorrelationFormat",
    "CopulaFormat",
    "CrossingForecastDirFmt",
    "CTREDiagnosticsDirFmt",
    "EventSeriesDirFmt",
    "EventSeriesFormat",
    "FitReportDirFmt",
    "FitReportFormat",
    "ForecastCurveFormat",
    "ForecastQuantilesFormat",
    "QQFormat",
    "StabilityScanDirFmt",
    "StabilityScanFormat",
    "CrossingForecast",
    "CTREDiagnostics",
    "ExceedanceStability",
    "MarkedRenewalEvents",
    "MittagLefflerFit",
]
