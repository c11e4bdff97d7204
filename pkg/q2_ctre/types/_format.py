# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
import json

import pandas as pd
from qiime2.core.exceptions import ValidationError
from qiime2.plugin import model

from q2_ctre.diagnostics import ACF_COLUMNS, COPULA_COLUMNS, QQ_COLUMNS
from q2_ctre.events import parse_events
from q2_ctre.exceedances import SCAN_COLUMNS
from q2_ctre.forecast import CURVE_COLUMNS, QUANTILE_COLUMNS

FIT_REPORT_KEYS = ["k", "ell", "n_exceedances", "fit", "lrt"]


class EventSeriesFormat(model.TextFileFormat):
    """Two-column ``time,magnitude`` CSV, header optional."""

    def _validate_(self, level):
        try:
            parse_events(str(self))
        except ValueError as e:
            raise ValidationError(str(e))


class _TableFormat(model.TextFileFormat):
    columns = []

    def _validate(self):
        try:
            header_obs = pd.read_csv(str(self), nrows=0).columns.tolist()
        except pd.errors.EmptyDataError:
            header_obs = []
        if header_obs != self.columns:
            raise ValidationError(
                f"Header line does not match {type(self).__name__}. Must consist "
                "of the following values: "
                + ", ".join(self.columns)
                + ".\n\nFound instead: "
                + ", ".join(header_obs)
            )

    def _validate_(self, level):
        self._validate()


class StabilityScanFormat(_TableFormat):
    columns = SCAN_COLUMNS


class AutocorrelationFormat(_TableFormat):
    columns = ACF_COLUMNS


class CopulaFormat(_TableFormat):
    columns = COPULA_COLUMNS


class QQFormat(_TableFormat):
    columns = QQ_COLUMNS


class ForecastCurveFormat(_TableFormat):
    columns = CURVE_COLUMNS


class ForecastQuantilesFormat(_TableFormat):
    columns = QUANTILE_COLUMNS


class FitReportFormat(model.TextFileFormat):
    def _validate_(self, level):
        try:
            with self.open() as fh:
                data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValidationError(f"The fit report is not valid JSON: {e}")
        if not isinstance(data, dict):
            raise ValidationError("The fit report must be a JSON object.")
        missing = [key for key in FIT_REPORT_KEYS if key not in data]
        if missing:
            raise ValidationError(
                "The fit report is missing the following keys: " + ", ".join(missing)
            )


EventSeriesDirFmt = model.SingleFileDirectoryFormat(
    "EventSeriesDirFmt", "events.csv", EventSeriesFormat
)
StabilityScanDirFmt = model.SingleFileDirectoryFormat(
    "StabilityScanDirFmt", "scan.csv", StabilityScanFormat
)
FitReportDirFmt = model.SingleFileDirectoryFormat(
    "FitReportDirFmt", "fit.json", FitReportFormat
)


class CTREDiagnosticsDirFmt(model.DirectoryFormat):
    acf = model.File("acf.csv", format=AutocorrelationFormat)
    copula = model.File("copula.csv", format=CopulaFormat)
    qq = model.File("qq.csv", format=QQFormat)


class CrossingForecastDirFmt(model.DirectoryFormat):
    curve = model.File("forecast.csv", format=ForecastCurveFormat)
    quantiles = model.File("quantiles.csv", format=ForecastQuantilesFormat)
