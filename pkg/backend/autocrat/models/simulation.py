"""
Autocrat - Strategy and Simulation Models
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from autocrat.models.game import Action, StateId


@dataclass(frozen=True)
class ActionDistribution:
    """Mix over the two extremal actions; a single atom when they coincide."""

    atoms: Tuple[Tuple[Action, float], ...]

    def probability(self, x: Action) -> float:
        return sum(p for a, p in self.atoms if a == x)

    @property
    def support(self) -> Tuple[Action, ...]:
        return tuple(a for a, p in self.atoms if p > 0.0)


@dataclass(frozen=True)
class Round:
    state: StateId
    action: Action
    reply: Action
    target: float


@dataclass(frozen=True)
class EpisodeResult:
    """Totals of one geometric-horizon playout."""

    total_utility: float
    total_rescaled: float
    rounds: int
    clamps: int = 0
    trajectory: Optional[List[Round]] = field(default=None, compare=False)
