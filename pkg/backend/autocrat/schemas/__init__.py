"""
Autocrat - Schemas

Pydantic documents for every JSON surface.
"""

from autocrat.schemas.game import GameDocument, StateDocument, fraction_to_json, to_fraction
from autocrat.schemas.report import (
    ExactBoundsDocument,
    SolveReportDocument,
    StateSummary,
    SweepRow,
    TraceDocument,
)
from autocrat.schemas.simulation import SimulationReport, VerdictRow, VerdictTable
from autocrat.schemas.strategy import STRATEGY_FORMAT, StateEndpoints, StrategySpec

__all__ = [
    "ExactBoundsDocument",
    "GameDocument",
    "STRATEGY_FORMAT",
    "SimulationReport",
    "SolveReportDocument",
    "StateDocument",
    "StateEndpoints",
    "StateSummary",
    "StrategySpec",
    "SweepRow",
    "TraceDocument",
    "VerdictRow",
    "VerdictTable",
    "fraction_to_json",
    "to_fraction",
]
