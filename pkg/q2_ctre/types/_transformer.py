# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
import json
import os

import pandas as pd

from q2_ctre.diagnostics import DiagnosticReport
from q2_ctre.events import EventSeries, parse_events, write_events
from q2_ctre.exceedances import StabilityScan
from q2_ctre.forecast import ForecastTable
from q2_ctre.pipeline import FitReport
from q2_ctre.plugin_setup import plugin
from q2_ctre.types._format import (
    CrossingForecastDirFmt,
    CTREDiagnosticsDirFmt,
    EventSeriesFormat,
    FitReportFormat,
    StabilityScanFormat,
)
from q2_ctre.utils import write_table


@plugin.register_transformer
def _1(data: EventSeries) -> EventSeriesFormat:
    ff = EventSeriesFormat()
    write_events(data, str(ff))
    return ff


@plugin.register_transformer
def _2(ff: EventSeriesFormat) -> EventSeries:
    return parse_events(str(ff))


@plugin.register_transformer
def _3(ff: EventSeriesFormat) -> pd.DataFrame:
    return parse_events(str(ff)).to_frame()


@plugin.register_transformer
def _4(data: StabilityScan) -> StabilityScanFormat:
    ff = StabilityScanFormat()
    write_table(data.to_frame(), str(ff))
    return ff


@plugin.register_transformer
def _5(ff: StabilityScanFormat) -> StabilityScan:
    return StabilityScan.from_frame(pd.read_csv(str(ff)))


@plugin.register_transformer
def _6(ff: StabilityScanFormat) -> pd.DataFrame:
    return pd.read_csv(str(ff))


@plugin.register_transformer
def _7(data: FitReport) -> FitReportFormat:
    ff = FitReportFormat()
    with ff.open() as fh:
        json.dump(data.to_dict(), fh, indent=2)
    return ff


@plugin.register_transformer
def _8(ff: FitReportFormat) -> FitReport:
    with ff.open() as fh:
        return FitReport.from_dict(json.load(fh))


@plugin.register_transformer
def _9(data: DiagnosticReport) -> CTREDiagnosticsDirFmt:
    ff = CTREDiagnosticsDirFmt()
    write_table(data.acf_frame(), os.path.join(str(ff), "acf.csv"))
    write_table(data.copula_frame(), os.path.join(str(ff), "copula.csv"))
    write_table(data.qq.to_frame(), os.path.join(str(ff), "qq.csv"))
    return ff


@plugin.register_transformer
def _10(ff: CTREDiagnosticsDirFmt) -> DiagnosticReport:
    return DiagnosticReport.from_frames(
        pd.read_csv(os.path.join(str(ff), "acf.csv")),
        pd.read_csv(os.path.join(str(ff), "copula.csv")),
        pd.read_csv(os.path.join(str(ff), "qq.csv")),
    )


@plugin.register_transformer
def _11(data: ForecastTable) -> CrossingForecastDirFmt:
    ff = CrossingForecastDirFmt()
    write_table(data.curve, os.path.join(str(ff), "forecast.csv"))
    write_table(data.quantiles, os.path.join(str(ff), "quantiles.csv"))
    return ff


@plugin.register_transformer
def _12(ff: CrossingForecastDirFmt) -> ForecastTable:
    return ForecastTable(
        curve=pd.read_csv(os.path.join(str(ff), "forecast.csv")),
        quantiles=pd.read_csv(os.path.join(str(ff), "quantiles.csv")),
    )
