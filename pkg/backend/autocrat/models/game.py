"""
Autocrat - Game Model

Multi-state two-player game with deterministic transitions and discounting.
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Dict, Mapping, Tuple

StateId = str
Action = str
JointAction = Tuple[Action, Action]


@dataclass(frozen=True)
class UtilityBounds:
    """Global utility extremes, the initial exterior estimate of every interval."""

    m0: float
    M0: float

    @property
    def spread(self) -> float:
        return self.M0 - self.m0


@dataclass(frozen=True)
class Violation:
    """One broken GameGraph invariant."""

    rule: str
    state: str = ""
    edge: str = ""

    def __str__(self) -> str:
        where = ", ".join(p for p in (self.state and f"state {self.state}", self.edge and f"edge {self.edge}") if p)
        return f"{self.rule} ({where})" if where else self.rule


@dataclass(frozen=True, eq=True)
class GameGraph:
    """
    Immutable game graph.

    Utilities and the discount are stored exactly; float views are derived
    and cached. Action names are per-state and opaque.
    """

    states: Tuple[StateId, ...]
    autocrat_actions: Mapping[StateId, Tuple[Action, ...]]
    opponent_actions: Mapping[StateId, Tuple[Action, ...]]
    transition: Mapping[StateId, Mapping[JointAction, StateId]]
    utility_exact: Mapping[StateId, Mapping[JointAction, Fraction]]
    discount_exact: Fraction
    start: StateId
    name: str = field(default="", compare=False)

    @cached_property
    def discount(self) -> float:
        return float(self.discount_exact)

    @cached_property
    def utility(self) -> Dict[StateId, Dict[JointAction, float]]:
        """Float view of the unscaled utility table."""
        return {
            s: {a: float(u) for a, u in table.items()}
            for s, table in self.utility_exact.items()
        }

    @cached_property
    def rescaled(self) -> Dict[StateId, Dict[JointAction, float]]:
        """Float view of (1 - lambda) * U, computed exactly then rounded."""
        scale = 1 - self.discount_exact
        return {
            s: {a: float(scale * u) for a, u in table.items()}
            for s, table in self.utility_exact.items()
        }

    @cached_property
    def state_index(self) -> Dict[StateId, int]:
        return {s: i for i, s in enumerate(self.states)}

    def joint_actions(self, s: StateId):
        """Declared-order product X_s x Y_s."""
        return [(x, y) for x in self.autocrat_actions[s] for y in self.opponent_actions[s]]

    def action_count(self) -> int:
        """Total number of autocrat actions over all states."""
        return sum(len(xs) for xs in self.autocrat_actions.values())

    def with_discount(self, discount: Fraction) -> "GameGraph":
        return replace(self, discount_exact=Fraction(discount))
