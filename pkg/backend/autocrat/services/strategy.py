"""
Autocrat - Strategy Service

Synthesizes the autocratic strategy as a value-tracking controller. The
controller state is the current game state plus the running target v, the
expected remaining rescaled utility the autocrat still has to enforce.
"""

from typing import Dict, Optional, Set, Tuple, Union

import structlog
from pydantic import ValidationError

from autocrat.core.config import settings
from autocrat.core.exceptions import (
    GameParseError,
    PrunedStartError,
    TargetDriftError,
    UnknownActionError,
    UnknownStateError,
    ValueOutOfRangeError,
)
from autocrat.models.game import Action, GameGraph, StateId
from autocrat.models.simulation import ActionDistribution
from autocrat.models.solver import SolveReport, ValueClass
from autocrat.schemas.strategy import StateEndpoints, StrategySpec
from autocrat.services.solver import classify_value

logger = structlog.get_logger(__name__)

# intervals narrower than this are treated as collapsed
COLLAPSE_WIDTH = 1e-12


def synthesize(
    rep: SolveReport,
    g: GameGraph,
    s0: Optional[StateId] = None,
    v: Optional[float] = None,
) -> StrategySpec:
    """
    Build the strategy that enforces ``v`` from ``s0``.

    Args:
        rep: Solved report of ``g``
        g: The game
        s0: Start state, the game's start by default
        v: Target value, the midpoint of the start interval by default

    Returns:
        StrategySpec ready for a Controller

    Raises:
        PrunedStartError: ``s0`` did not survive pruning
        ValueOutOfRangeError: ``v`` is not enforceable from ``s0``
    """
    s0 = g.start if s0 is None else s0
    if s0 not in g.state_index:
        raise UnknownStateError(s0)
    if not rep.survives(s0):
        raise PrunedStartError(s0)

    m, M = rep.interval(s0)
    v = (m + M) / 2 if v is None else float(v)
    verdict = classify_value(rep, s0, v)
    if verdict is not ValueClass.ENFORCEABLE:
        kind = "left unenforceable" if verdict is ValueClass.LEFT_UNENFORCEABLE else "right unenforceable"
        raise ValueOutOfRangeError(s0, v, (m, M), kind)

    drift = settings.DRIFT_FACTOR * rep.tol / (1 - rep.discount)
    states = {
        s: StateEndpoints(
            m=rep.bounds.lower[s],
            M=rep.bounds.upper[s],
            x_minus=rep.x_minus_rep(s),
            x_plus=rep.x_plus_rep(s),
            cornered=s in rep.cornered,
        )
        for s in rep.support.states
    }
    logger.info("Strategy synthesized", start=s0, target=v, states=len(states))
    return StrategySpec(
        discount=rep.discount,
        start=s0,
        v0=min(max(v, m), M),
        drift=drift,
        states=states,
    )


def load_spec(source: Union[str, bytes]) -> StrategySpec:
    """Parse a strategy file."""
    try:
        return StrategySpec.model_validate_json(source)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(p) for p in first["loc"])
        raise GameParseError(f"strategy file: {first['msg']}", location=location) from e


def dump_spec(spec: StrategySpec) -> str:
    return spec.model_dump_json(by_alias=True, indent=2)


def check_spec(spec: StrategySpec, game: GameGraph) -> None:
    """
    Check that a strategy fits a game.

    Every state must exist with both extremal actions available, and every
    state reachable through an extremal action must have an entry of its own.

    Raises:
        UnknownStateError: a state the game does not declare
        UnknownActionError: an extremal action the state does not offer
        GameParseError: a reachable state has no entry in the strategy
    """
    if spec.start not in spec.states:
        raise GameParseError(f"no entry for start state {spec.start!r}", location="states")
    for s, end in spec.states.items():
        if s not in game.state_index:
            raise UnknownStateError(s)
        for x in (end.x_minus, end.x_plus):
            if x not in game.autocrat_actions[s]:
                raise UnknownActionError(s, x, "autocrat")
            for y in game.opponent_actions[s]:
                t = game.transition[s][(x, y)]
                if t not in spec.states:
                    raise GameParseError(
                        f"no entry for state {t!r} reached by {x},{y}",
                        location=f"states.{s}",
                    )


class Controller:
    """
    Finite controller playing a StrategySpec on a game.

    Mutable by design of the hot loop; ``clone`` forks an independent copy.
    """

    __slots__ = ("game", "spec", "state", "target", "clamps", "_ends", "_lam", "_drift")

    def __init__(self, spec: StrategySpec, game: GameGraph):
        check_spec(spec, game)
        self.game = game
        self.spec = spec
        self._ends: Dict[StateId, Tuple[float, float, Action, Action, bool]] = {
            s: (e.m, e.M, e.x_minus, e.x_plus, e.cornered or e.M - e.m <= COLLAPSE_WIDTH)
            for s, e in spec.states.items()
        }
        self._lam = spec.discount
        self._drift = spec.drift
        self.state = spec.start
        self.target = spec.v0
        self.clamps = 0

    def clone(self) -> "Controller":
        twin = Controller.__new__(Controller)
        for slot in Controller.__slots__:
            setattr(twin, slot, getattr(self, slot))
        return twin

    def interval(self, s: Optional[StateId] = None) -> Tuple[float, float]:
        m, M, _, _, _ = self._ends[self.state if s is None else s]
        return m, M

    def mix(self) -> Tuple[Action, Action, float]:
        """
        (x_minus, x_plus, p_plus) for the current state and target.

        Raises:
            TargetDriftError: the target left the interval beyond the drift tolerance
        """
        m, M, xm, xp, single = self._ends[self.state]
        v = self.target
        if v < m - self._drift or v > M + self._drift:
            raise TargetDriftError(self.state, v, (m, M))
        if single or xm == xp:
            return xm, xm, 0.0
        p = (v - m) / (M - m)
        return xm, xp, min(1.0, max(0.0, p))

    def act(self) -> ActionDistribution:
        xm, xp, p = self.mix()
        if xm == xp or p <= 0.0:
            return ActionDistribution(((xm, 1.0),))
        if p >= 1.0:
            return ActionDistribution(((xp, 1.0),))
        return ActionDistribution(((xm, 1.0 - p), (xp, p)))

    def step(self, x: Action, y: Action) -> "Controller":
        """
        Advance in place after the joint action (x, y).

        The realised expectation Phi is M for x_plus and m for x_minus; in
        cornered or collapsed states it is the target itself.

        Raises:
            UnknownActionError: x is not an extremal action or y is not a reply
            TargetDriftError: the next target leaves its interval beyond tolerance
        """
        s = self.state
        m, M, xm, xp, single = self._ends[s]
        if single or xm == xp:
            if x != xm:
                raise UnknownActionError(s, x, "extremal")
            phi = self.target
        elif x == xp:
            phi = M
        elif x == xm:
            phi = m
        else:
            raise UnknownActionError(s, x, "extremal")

        try:
            nxt = self.game.transition[s][(x, y)]
        except KeyError:
            raise UnknownActionError(s, y, "opponent") from None
        v = (phi - self.game.rescaled[s][(x, y)]) / self._lam

        lo, hi, _, _, _ = self._ends[nxt]
        if v < lo - self._drift or v > hi + self._drift:
            raise TargetDriftError(nxt, v, (lo, hi))
        if v < lo:
            v = lo
            self.clamps += 1
        elif v > hi:
            v = hi
            self.clamps += 1
        self.state = nxt
        self.target = v
        return self


def act(c: Controller) -> ActionDistribution:
    return c.act()


def update(c: Controller, x: Action, y: Action) -> Controller:
    """Controller after (x, y); ``c`` itself is left untouched."""
    return c.clone().step(x, y)


def cornered_states(rep: SolveReport) -> Tuple[Set[StateId], int]:
    if not rep.solved:
        raise ValueError("cornered states need a Solved report")
    return set(rep.cornered), rep.longest_chain


def memory_requirement(rep: SolveReport) -> int:
    """Rounds of history the autocratic strategy needs: longest cornered chain + 1."""
    _, chain = cornered_states(rep)
    return chain + 1
