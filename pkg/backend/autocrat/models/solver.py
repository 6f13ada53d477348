"""
Autocrat - Solver Models

Supports, interval bounds, iteration traces and solve reports.
"""

import enum
from dataclasses import dataclass, field
from typing import Iterable, List, Mapping, Tuple

from autocrat.models.game import Action, GameGraph, StateId


class InitMode(str, enum.Enum):
    """Initialisation of the bound iteration."""
    STANDARD = "standard"
    SWAPPED = "swapped"
    EXPLICIT = "explicit"


class SolveStatus(str, enum.Enum):
    """Final status of the pruning loop."""
    SOLVED = "Solved"
    EMPTY = "Empty"


class ValueClass(str, enum.Enum):
    """Classification of a candidate target value in a state."""
    ENFORCEABLE = "Enforceable"
    LEFT_UNENFORCEABLE = "LeftUnenforceable"
    RIGHT_UNENFORCEABLE = "RightUnenforceable"


@dataclass(frozen=True)
class Support:
    """Per-state autocrat actions still allowed; absent states are pruned."""

    actions: Mapping[StateId, Tuple[Action, ...]]

    @classmethod
    def full(cls, g: GameGraph) -> "Support":
        return cls({s: tuple(g.autocrat_actions[s]) for s in g.states})

    @property
    def states(self) -> Tuple[StateId, ...]:
        return tuple(self.actions)

    def __contains__(self, s: object) -> bool:
        return s in self.actions

    def __getitem__(self, s: StateId) -> Tuple[Action, ...]:
        return self.actions[s]

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def is_empty(self) -> bool:
        return not self.actions

    def action_count(self) -> int:
        return sum(len(xs) for xs in self.actions.values())

    def pairs(self) -> Iterable[Tuple[StateId, Action]]:
        for s, xs in self.actions.items():
            for x in xs:
                yield s, x

    def is_subset_of(self, other: "Support") -> bool:
        return all(s in other and set(xs) <= set(other[s]) for s, xs in self.actions.items())


@dataclass(frozen=True)
class Bounds:
    """Per-state interval endpoints (m_s, M_s)."""

    lower: Mapping[StateId, float]
    upper: Mapping[StateId, float]

    @classmethod
    def constant(cls, states: Iterable[StateId], low: float, high: float) -> "Bounds":
        states = list(states)
        return cls({s: low for s in states}, {s: high for s in states})

    def interval(self, s: StateId) -> Tuple[float, float]:
        return self.lower[s], self.upper[s]

    @property
    def states(self) -> Tuple[StateId, ...]:
        return tuple(self.lower)

    def distance(self, other: "Bounds") -> float:
        """Sup-norm distance over the common states."""
        common = [s for s in self.lower if s in other.lower]
        if not common:
            return 0.0
        return max(
            max(abs(self.lower[s] - other.lower[s]), abs(self.upper[s] - other.upper[s]))
            for s in common
        )


@dataclass(frozen=True)
class IterationTrace:
    """Snapshots of one run of the bound iteration."""

    init: InitMode
    snapshots: List[Bounds]
    deltas: List[float]
    iterations: int


@dataclass(frozen=True)
class PrunedAction:
    state: StateId
    action: Action
    outer_round: int


@dataclass(frozen=True)
class Replies:
    """Unenforcing replies of the opponent against one autocrat action."""

    y_plus: Action
    y_minus: Action


@dataclass(frozen=True)
class SolveReport:
    """Everything the pruning loop learned about a game."""

    status: SolveStatus
    support: Support
    bounds: Bounds
    x_minus: Mapping[StateId, Tuple[Action, ...]]
    x_plus: Mapping[StateId, Tuple[Action, ...]]
    replies: Mapping[StateId, Mapping[Action, Replies]]
    cornered: Tuple[StateId, ...]
    longest_chain: int
    cornered_cycle: bool
    traces: List[IterationTrace]
    pruned_actions: List[PrunedAction]
    tol: float
    discount: float
    start: StateId
    start_pruned: bool = False
    runtime_estimate: int = 0
    diagnostics: List[str] = field(default_factory=list)

    @property
    def solved(self) -> bool:
        return self.status is SolveStatus.SOLVED

    def survives(self, s: StateId) -> bool:
        return self.solved and s in self.support

    def interval(self, s: StateId) -> Tuple[float, float]:
        return self.bounds.interval(s)

    def x_minus_rep(self, s: StateId) -> Action:
        """Deterministic representative of the left extremal actions."""
        return self.x_minus[s][0]

    def x_plus_rep(self, s: StateId) -> Action:
        return self.x_plus[s][0]

    @property
    def iterations(self) -> int:
        return sum(t.iterations for t in self.traces)
