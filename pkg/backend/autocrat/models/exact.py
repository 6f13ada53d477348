"""
Autocrat - Exact Recovery Models
"""

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping

from autocrat.models.game import Action, StateId


class Side(str, enum.Enum):
    """Which endpoint a successor graph or exact vector describes."""
    LEFT = "Left"
    RIGHT = "Right"


@dataclass(frozen=True)
class SuccessorEdge:
    action: Action
    reply: Action
    successor: StateId


@dataclass(frozen=True)
class SuccessorGraph:
    """Functional graph: one chosen edge per surviving state."""

    side: Side
    edges: Mapping[StateId, SuccessorEdge]

    def successor(self, s: StateId) -> StateId:
        return self.edges[s].successor

    def to_digraph(self):
        import networkx as nx

        graph = nx.DiGraph()
        graph.add_nodes_from(self.edges)
        for s, edge in self.edges.items():
            graph.add_edge(s, edge.successor, action=edge.action, reply=edge.reply)
        return graph


@dataclass(frozen=True)
class Component:
    """One weakly connected piece of a functional graph."""

    cycle: List[StateId]
    members: List[StateId]


@dataclass(frozen=True)
class ExactBounds:
    """Exact endpoint values on one side, with per-state certificates."""

    side: Side
    values: Dict[StateId, Fraction]
    certified: Dict[StateId, bool]
    diagnostics: List[str] = field(default_factory=list)

    @property
    def all_certified(self) -> bool:
        return all(self.certified.values())
