"""
Autocrat - Domain Models

Immutable value types shared by the services.
"""

from autocrat.models.exact import Component, ExactBounds, Side, SuccessorEdge, SuccessorGraph
from autocrat.models.game import GameGraph, UtilityBounds, Violation
from autocrat.models.simulation import ActionDistribution, EpisodeResult, Round
from autocrat.models.solver import (
    Bounds,
    InitMode,
    IterationTrace,
    PrunedAction,
    Replies,
    SolveReport,
    SolveStatus,
    Support,
    ValueClass,
)

__all__ = [
    "ActionDistribution",
    "Bounds",
    "Component",
    "EpisodeResult",
    "ExactBounds",
    "GameGraph",
    "InitMode",
    "IterationTrace",
    "PrunedAction",
    "Replies",
    "Round",
    "Side",
    "SolveReport",
    "SolveStatus",
    "SuccessorEdge",
    "SuccessorGraph",
    "Support",
    "UtilityBounds",
    "ValueClass",
    "Violation",
]
