"""
Autocrat - Simulation Service

Verifies enforcement two ways: Monte Carlo episodes with a geometric
horizon against opponent policies, and an exhaustive finite-horizon
expectation with a tail bound for deterministic opponents.
"""

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.stats
import structlog

from autocrat.core.config import settings
from autocrat.core.exceptions import (
    HorizonTooLargeError,
    TargetDriftError,
    UnknownActionError,
    UnknownStateError,
)
from autocrat.core.logging import log_performance_metric, log_verification_event
from autocrat.models.game import Action, GameGraph, StateId
from autocrat.models.simulation import EpisodeResult, Round
from autocrat.models.solver import SolveReport
from autocrat.schemas.simulation import SimulationReport, VerdictRow, VerdictTable
from autocrat.schemas.strategy import StrategySpec
from autocrat.services.game_graph import utility_bounds
from autocrat.services.strategy import Controller, check_spec, synthesize

logger = structlog.get_logger(__name__)

Mix = Tuple[Action, Action, float]

# episodes handed to one worker at a time
EPISODE_BLOCK = 512


class OpponentPolicy:
    """
    Opponent behaviour. A policy sees the state, the round index and the
    autocrat's current mix, never the autocrat's realised action.
    """

    name = "policy"
    deterministic = False

    def __init__(self, game: GameGraph):
        self.game = game

    def prepare(self, spec: StrategySpec) -> None:
        """Hook run once per strategy before play."""

    def choose(self, state: StateId, round_index: int, mix: Mix, rng) -> Action:
        raise NotImplementedError


class UniformPolicy(OpponentPolicy):
    name = "uniform"

    def choose(self, state, round_index, mix, rng):
        ys = self.game.opponent_actions[state]
        return ys[int(rng.random() * len(ys))]


class FixedPolicy(OpponentPolicy):
    """Same reply every round, globally or per state."""

    deterministic = True

    def __init__(self, game: GameGraph, action: Optional[Action] = None, per_state: Optional[Dict[StateId, Action]] = None):
        super().__init__(game)
        per_state = dict(per_state or {})
        self.replies: Dict[StateId, Action] = {}
        for s in game.states:
            ys = game.opponent_actions[s]
            y = per_state.pop(s, action if action is not None else ys[0])
            if y not in ys:
                raise UnknownActionError(s, y, "opponent")
            self.replies[s] = y
        if per_state:
            raise UnknownStateError(next(iter(per_state)))
        if action is not None:
            self.name = f"fixed:{action}"
        else:
            self.name = "fixed:" + ",".join(f"{s}={y}" for s, y in self.replies.items())

    def choose(self, state, round_index, mix, rng):
        return self.replies[state]


class _Adversarial(OpponentPolicy):
    """Best response to the autocrat's mix against one side of the bounds."""

    deterministic = True
    pick_max = True

    def prepare(self, spec: StrategySpec) -> None:
        g, lam = self.game, self.game.discount
        side = "m" if self.pick_max else "M"
        self._objective = {}
        for s, end in spec.states.items():
            for x in {end.x_minus, end.x_plus}:
                for y in g.opponent_actions[s]:
                    t = g.transition[s][(x, y)]
                    bound = spec.states[t].m if side == "m" else spec.states[t].M
                    self._objective[(s, x, y)] = lam * bound + g.rescaled[s][(x, y)]

    def choose(self, state, round_index, mix, rng):
        xm, xp, p = mix
        best_y, best = None, None
        for y in self.game.opponent_actions[state]:
            value = (1 - p) * self._objective[(state, xm, y)] + p * self._objective[(state, xp, y)]
            if best is None or (value > best if self.pick_max else value < best):
                best_y, best = y, value
        return best_y


class AdversarialLowPolicy(_Adversarial):
    """Pushes the target up against the left bounds: argmax of the lambda*m objective."""
    name = "adversarial-low"
    pick_max = True


class AdversarialHighPolicy(_Adversarial):
    """Pushes the target down against the right bounds: argmin of the lambda*M objective."""
    name = "adversarial-high"
    pick_max = False


class ScriptedPolicy(OpponentPolicy):
    """Cycles through a fixed reply sequence by round index."""

    deterministic = True

    def __init__(self, game: GameGraph, sequence: Sequence[Action]):
        super().__init__(game)
        if not sequence:
            raise ValueError("scripted policy needs at least one action")
        self.sequence = tuple(sequence)
        self.name = "scripted:" + ",".join(self.sequence)

    def choose(self, state, round_index, mix, rng):
        y = self.sequence[round_index % len(self.sequence)]
        if y not in self.game.opponent_actions[state]:
            raise UnknownActionError(state, y, "opponent")
        return y


class SeededRandomPolicy(OpponentPolicy):
    """Stationary mixture per state, drawn from a flat Dirichlet by its own seed."""

    def __init__(self, game: GameGraph, seed: int):
        super().__init__(game)
        self.seed = seed
        self.name = f"random:{seed}"
        gen = np.random.Generator(np.random.Philox(seed))
        self.cumulative = {
            s: np.cumsum(gen.dirichlet(np.ones(len(game.opponent_actions[s]))))
            for s in game.states
        }

    def choose(self, state, round_index, mix, rng):
        ys = self.game.opponent_actions[state]
        k = int(np.searchsorted(self.cumulative[state], rng.random(), side="right"))
        return ys[min(k, len(ys) - 1)]


def parse_policy(text: str, game: GameGraph) -> OpponentPolicy:
    """
    Build a policy from its command-line token.

    Tokens: uniform, fixed:<y>, fixed:<s>=<y>,..., adversarial-low,
    adversarial-high, scripted:<y>,<y>,..., random:<seed>.
    """
    kind, _, arg = text.strip().partition(":")
    if kind == "uniform":
        return UniformPolicy(game)
    if kind == "adversarial-low":
        return AdversarialLowPolicy(game)
    if kind == "adversarial-high":
        return AdversarialHighPolicy(game)
    if kind == "fixed" and arg:
        if "=" in arg:
            pairs = dict(item.split("=", 1) for item in arg.split(","))
            return FixedPolicy(game, per_state=pairs)
        return FixedPolicy(game, action=arg)
    if kind == "scripted" and arg:
        return ScriptedPolicy(game, arg.split(","))
    if kind == "random" and arg:
        return SeededRandomPolicy(game, int(arg))
    raise ValueError(f"unknown opponent policy {text!r}")


def deterministic_policies(game: GameGraph) -> List[OpponentPolicy]:
    """Every stationary per-state fixed policy plus both adversaries."""
    suite: List[OpponentPolicy] = []
    for combo in itertools.product(*(game.opponent_actions[s] for s in game.states)):
        suite.append(FixedPolicy(game, per_state=dict(zip(game.states, combo))))
    suite.append(AdversarialLowPolicy(game))
    suite.append(AdversarialHighPolicy(game))
    return suite


def episode_rng(seed: int, episode: int) -> np.random.Generator:
    """Counter-based Philox substream of ``seed`` for one episode."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(episode,))))


def run_episode(
    g: GameGraph,
    spec: StrategySpec,
    opp: OpponentPolicy,
    rng: np.random.Generator,
    keep_trajectory: bool = False,
) -> EpisodeResult:
    """
    Play one episode: round 0 always, then continue with probability lambda.

    Raises:
        TargetDriftError: the controller target drifted out of its interval
    """
    c = Controller(spec, g)
    rounds = int(rng.geometric(1.0 - g.discount))
    draws = rng.random(rounds)
    total = 0.0
    rescaled = 0.0
    trajectory: Optional[List[Round]] = [] if keep_trajectory else None
    utility, scaled = g.utility, g.rescaled
    for k in range(rounds):
        s = c.state
        mix = c.mix()
        x = mix[1] if draws[k] < mix[2] else mix[0]
        y = opp.choose(s, k, mix, rng)
        total += utility[s][(x, y)]
        rescaled += scaled[s][(x, y)]
        if trajectory is not None:
            trajectory.append(Round(state=s, action=x, reply=y, target=c.target))
        c.step(x, y)
    return EpisodeResult(
        total_utility=total,
        total_rescaled=rescaled,
        rounds=rounds,
        clamps=c.clamps,
        trajectory=trajectory,
    )


def simulate(
    g: GameGraph,
    spec: StrategySpec,
    opp: OpponentPolicy,
    episodes: Optional[int] = None,
    seed: Optional[int] = None,
    confidence: Optional[float] = None,
    threads: Optional[int] = None,
) -> SimulationReport:
    """
    Monte Carlo estimate of the enforced value.

    Episode i always uses substream i of ``seed``, and results are reduced
    in episode order, so the report does not depend on ``threads``.

    Args:
        g: Game
        spec: Strategy to play
        opp: Opponent policy
        episodes: Number of episodes (>= 1)
        seed: Root seed
        confidence: Confidence level of the reported interval
        threads: Worker threads, settings.THREADS by default

    Returns:
        SimulationReport over the rescaled totals
    """
    episodes = settings.DEFAULT_EPISODES if episodes is None else episodes
    seed = settings.DEFAULT_SEED if seed is None else seed
    confidence = settings.CONFIDENCE if confidence is None else confidence
    threads = settings.THREADS if threads is None else threads
    if episodes < 1:
        raise ValueError("episodes must be at least 1")
    check_spec(spec, g)
    opp.prepare(spec)
    started = time.perf_counter()

    def run_block(first: int) -> List[EpisodeResult]:
        last = min(first + EPISODE_BLOCK, episodes)
        return [run_episode(g, spec, opp, episode_rng(seed, i)) for i in range(first, last)]

    blocks = range(0, episodes, EPISODE_BLOCK)
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = [r for block in pool.map(run_block, blocks) for r in block]
    else:
        results = [r for first in blocks for r in run_block(first)]

    totals = np.fromiter((r.total_rescaled for r in results), dtype=float, count=episodes)
    rounds = np.fromiter((r.rounds for r in results), dtype=float, count=episodes)
    clamps = sum(r.clamps for r in results)

    mean = float(totals.mean())
    stderr = float(totals.std(ddof=1) / math.sqrt(episodes)) if episodes > 1 else 0.0
    rounds_stderr = float(rounds.std(ddof=1) / math.sqrt(episodes)) if episodes > 1 else 0.0
    z = float(scipy.stats.norm.ppf(0.5 + confidence / 2))

    report = SimulationReport(
        policy=opp.name,
        episodes=episodes,
        seed=seed,
        mean=mean,
        stderr=stderr,
        confidence=confidence,
        ci99=(mean - z * stderr, mean + z * stderr),
        clamps=clamps,
        mean_rounds=float(rounds.mean()),
        rounds_stderr=rounds_stderr,
    )
    logger.info("Simulation finished", policy=opp.name, episodes=episodes, seed=seed, mean=mean, stderr=stderr)
    elapsed = time.perf_counter() - started
    log_performance_metric(
        logger, "episode_rate", episodes / elapsed if elapsed > 0 else float("inf"), unit="episodes/s", threads=threads
    )
    if clamps:
        logger.debug("Controller targets clamped", clamps=clamps)
    return report


def exact_expectation(
    g: GameGraph,
    spec: StrategySpec,
    opp: OpponentPolicy,
    horizon: Optional[int] = None,
    budget: Optional[int] = None,
) -> Tuple[float, float]:
    """
    Exhaustive expected rescaled utility up to ``horizon`` plus a tail bound.

    Branches reaching the same (state, target) at the same depth are merged,
    so the frontier is bounded by the number of distinct controller states.

    Returns:
        (lower, upper) bracketing the full expectation

    Raises:
        HorizonTooLargeError: the frontier outgrew the enumeration budget
        TargetDriftError: propagated from the controller
    """
    horizon = settings.DEFAULT_HORIZON if horizon is None else horizon
    budget = settings.ENUMERATION_BUDGET if budget is None else budget
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if not opp.deterministic:
        raise ValueError(f"policy {opp.name} is not deterministic")
    check_spec(spec, g)
    opp.prepare(spec)

    lam = g.discount
    cursor = Controller(spec, g)
    frontier: Dict[Tuple[StateId, float], Tuple[float, float]] = {(spec.start, round(spec.v0, 12)): (1.0, spec.v0)}
    total = 0.0
    weight = 1.0
    nodes = 0

    for depth in range(horizon + 1):
        step_sum = 0.0
        nxt: Dict[Tuple[StateId, float], Tuple[float, float]] = {}
        for (s, _), (prob, v) in frontier.items():
            cursor.state, cursor.target = s, v
            mix = cursor.mix()
            y = opp.choose(s, depth, mix, None)
            xm, xp, p = mix
            for x, px in ((xm, 1.0 - p), (xp, p)) if xm != xp else ((xm, 1.0),):
                if px <= 0.0:
                    continue
                step_sum += prob * px * g.rescaled[s][(x, y)]
                if depth == horizon:
                    continue
                child = cursor.clone().step(x, y)
                key = (child.state, round(child.target, 12))
                old = nxt.get(key)
                nxt[key] = (prob * px + (old[0] if old else 0.0), child.target)
        total += weight * step_sum
        weight *= lam
        nodes += len(nxt)
        if len(nxt) > budget:
            raise HorizonTooLargeError(horizon, len(nxt), budget)
        frontier = nxt

    ub = utility_bounds(g)
    logger.debug("Exact expectation enumerated", horizon=horizon, nodes=nodes, policy=opp.name)
    return total + weight * ub.m0, total + weight * ub.M0


def verify_spec(
    g: GameGraph,
    spec: StrategySpec,
    policies: Sequence[OpponentPolicy],
    episodes: Optional[int] = None,
    seed: Optional[int] = None,
    horizon: Optional[int] = None,
    confidence: Optional[float] = None,
) -> List[VerdictRow]:
    """
    Verdict rows for one strategy against every policy.

    A row passes iff the Monte Carlo interval covers the target and, for
    deterministic policies, the oracle interval does too. Drift fails the
    row instead of aborting the table.
    """
    target = spec.v0
    slack = spec.drift
    rows: List[VerdictRow] = []
    for opp in policies:
        try:
            sim = simulate(g, spec, opp, episodes=episodes, seed=seed, confidence=confidence)
            mc_pass = sim.covers(target)
            lo = hi = None
            oracle_pass = True
            if opp.deterministic:
                lo, hi = exact_expectation(g, spec, opp, horizon=horizon)
                oracle_pass = lo - slack <= target <= hi + slack
            row = VerdictRow(
                target=target,
                policy=opp.name,
                mc_pass=mc_pass,
                mean=sim.mean,
                oracle_lo=lo,
                oracle_hi=hi,
                passed=mc_pass and oracle_pass,
            )
        except (TargetDriftError, HorizonTooLargeError) as e:
            row = VerdictRow(target=target, policy=opp.name, mc_pass=False, passed=False, error=e.message)
        log_verification_event(logger, target=target, policy=opp.name, passed=row.passed, details={"error": row.error} if row.error else None)
        rows.append(row)
    return rows


def verify_enforcement(
    g: GameGraph,
    rep: SolveReport,
    s0: Optional[StateId],
    targets: Sequence[float],
    policies: Sequence[OpponentPolicy],
    episodes: Optional[int] = None,
    seed: Optional[int] = None,
    horizon: Optional[int] = None,
    confidence: Optional[float] = None,
) -> VerdictTable:
    """Synthesize one strategy per target and verify each against the suite."""
    seed = settings.DEFAULT_SEED if seed is None else seed
    rows: List[VerdictRow] = []
    for target in targets:
        spec = synthesize(rep, g, s0, target)
        rows.extend(verify_spec(g, spec, policies, episodes, seed, horizon, confidence))
    return VerdictTable(rows=rows, seed=seed)
