# ----------------------------------------------------------------------------
# Copyright (c) 2024, q2-ctre development team.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------
from qiime2.core.type import SemanticType

MarkedRenewalEvents = SemanticType("MarkedRenewalEvents")
ExceedanceStability = SemanticType("ExceedanceStability")
MittagLefflerFit = SemanticType("MittagLefflerFit")
CTREDiagnostics = SemanticType("CTREDiagnostics")
CrossingForecast = SemanticType("CrossingForecast")
