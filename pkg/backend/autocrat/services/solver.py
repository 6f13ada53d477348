"""
Autocrat - Solver Service

Computes the enforceable-value intervals by monotone fixed-point iteration
and prunes the game graph until every surviving extremal action satisfies
the enforceability inequality.
"""

import math
import time
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from autocrat.core.config import settings
from autocrat.core.exceptions import NonConvergenceError, PrunedStateError
from autocrat.core.logging import log_solve_event
from autocrat.models.game import Action, GameGraph, StateId, UtilityBounds
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
from autocrat.services.game_graph import (
    compile_arrays,
    longest_chain,
    utility_bounds,
    with_discount,
)

logger = structlog.get_logger(__name__)


def iteration_bound(tol: float, discount: float, bounds: UtilityBounds) -> int:
    """
    Upper bound on the sweeps needed to reach sup-norm error ``tol``.

    Args:
        tol: Target error
        discount: Discount factor lambda
        bounds: Global utility extremes

    Returns:
        ceil(ln(tol / (M0 - m0)) / ln(lambda)), or 1 if tol already covers the spread
    """
    spread = bounds.spread
    if tol >= spread:
        return 1
    return max(1, math.ceil(math.log(tol / spread) / math.log(discount) - 1e-12))


def runtime_estimate(g: GameGraph, tol: Optional[float] = None) -> int:
    """Worst-case elementary operations of one bound iteration."""
    tol = settings.DEFAULT_TOL if tol is None else tol
    widest = max(len(g.autocrat_actions[s]) * len(g.opponent_actions[s]) for s in g.states)
    return widest * len(g.states) * iteration_bound(tol, g.discount, utility_bounds(g))


def _initial_arrays(
    g: GameGraph,
    supp: Support,
    init: InitMode,
    start: Optional[Bounds],
) -> Tuple[np.ndarray, np.ndarray]:
    n = len(g.states)
    ub = utility_bounds(g)
    lower = np.zeros(n)
    upper = np.zeros(n)
    for s in supp.states:
        i = g.state_index[s]
        if start is not None:
            lower[i], upper[i] = start.interval(s)
        elif init is InitMode.SWAPPED:
            lower[i], upper[i] = ub.M0, ub.m0
        else:
            lower[i], upper[i] = ub.m0, ub.M0
    return lower, upper


def _to_bounds(g: GameGraph, supp: Support, lower: np.ndarray, upper: np.ndarray) -> Bounds:
    idx = g.state_index
    return Bounds(
        {s: float(lower[idx[s]]) for s in supp.states},
        {s: float(upper[idx[s]]) for s in supp.states},
    )


def iterate_bounds(
    g: GameGraph,
    supp: Support,
    init: InitMode = InitMode.STANDARD,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    start: Optional[Bounds] = None,
) -> Tuple[Bounds, IterationTrace]:
    """
    Run the Jacobi iteration of the m/M recursions on a support.

    Every sweep reads only the previous snapshot. Iteration stops once the
    sup-norm change drops below tol * (1 - lambda).

    Args:
        g: Game graph
        supp: Nonempty, well-formed support
        init: Standard (m0, M0), swapped (M0, m0) or explicit start
        tol: Tolerance, settings.DEFAULT_TOL by default
        max_iter: Sweep budget, iteration_bound + 2 by default
        start: Explicit initial Bounds; implies init=EXPLICIT

    Returns:
        Final Bounds and the full IterationTrace

    Raises:
        NonConvergenceError: budget exhausted above the stopping threshold
    """
    if supp.is_empty:
        raise ValueError("cannot iterate on an empty support")
    tol = settings.DEFAULT_TOL if tol is None else tol
    lam = g.discount
    threshold = tol * (1 - lam)
    if start is not None:
        init = InitMode.EXPLICIT
    if max_iter is None:
        max_iter = iteration_bound(threshold, lam, utility_bounds(g)) + 2

    arr = compile_arrays(g, supp)
    succ, reward = arr.successor, arr.reward
    ymask = arr.ymask[:, None, :]
    xmask = arr.xmask
    inactive = ~arr.active

    lower, upper = _initial_arrays(g, supp, init, start)
    snapshots = [_to_bounds(g, supp, lower, upper)]
    deltas: List[float] = []
    delta = math.inf
    iterations = 0

    while iterations < max_iter:
        left = np.where(ymask, lam * lower[succ] + reward, -np.inf).max(axis=2)
        new_lower = np.where(xmask, left, np.inf).min(axis=1)
        right = np.where(ymask, lam * upper[succ] + reward, np.inf).min(axis=2)
        new_upper = np.where(xmask, right, -np.inf).max(axis=1)
        new_lower[inactive] = 0.0
        new_upper[inactive] = 0.0

        delta = float(max(np.abs(new_lower - lower).max(), np.abs(new_upper - upper).max()))
        lower, upper = new_lower, new_upper
        iterations += 1
        deltas.append(delta)
        snapshots.append(_to_bounds(g, supp, lower, upper))
        if delta < threshold:
            break

    if delta >= threshold:
        raise NonConvergenceError(
            f"bound iteration did not converge in {max_iter} sweeps (delta {delta:g})",
            {"max_iter": max_iter, "delta": delta},
        )

    logger.debug("Bound iteration converged", init=init.value, iterations=iterations, delta=delta)
    trace = IterationTrace(init=init, snapshots=snapshots, deltas=deltas, iterations=iterations)
    return snapshots[-1], trace


def left_objective(g: GameGraph, b: Bounds, s: StateId, x: Action) -> float:
    """max_y { lambda * m_T(x,y;s) + U_lambda(x,y;s) }"""
    lam = g.discount
    return max(
        lam * b.lower[g.transition[s][(x, y)]] + g.rescaled[s][(x, y)]
        for y in g.opponent_actions[s]
    )


def right_objective(g: GameGraph, b: Bounds, s: StateId, x: Action) -> float:
    """min_y { lambda * M_T(x,y;s) + U_lambda(x,y;s) }"""
    lam = g.discount
    return min(
        lam * b.upper[g.transition[s][(x, y)]] + g.rescaled[s][(x, y)]
        for y in g.opponent_actions[s]
    )


def extremal_actions(
    g: GameGraph,
    supp: Support,
    b: Bounds,
    s: StateId,
    tol: Optional[float] = None,
) -> Tuple[Tuple[Action, ...], Tuple[Action, ...]]:
    """
    All tied left and right extremal actions of a state, in declared order.

    Returns:
        (x_minus candidates, x_plus candidates)
    """
    tol = settings.DEFAULT_TOL if tol is None else tol
    tie = settings.TIE_FACTOR * tol
    left = {x: left_objective(g, b, s, x) for x in supp[s]}
    right = {x: right_objective(g, b, s, x) for x in supp[s]}
    low = min(left.values())
    high = max(right.values())
    x_minus = tuple(x for x in supp[s] if left[x] <= low + tie)
    x_plus = tuple(x for x in supp[s] if right[x] >= high - tie)
    return x_minus, x_plus


def unenforcing_replies(
    g: GameGraph,
    b: Bounds,
    s: StateId,
    x: Action,
    tol: Optional[float] = None,
) -> Replies:
    """
    Opponent replies that push the target hardest against its bounds.

    y_plus maximises the left objective and y_minus minimises the right
    one; near-ties go to the first reply in declared order.
    """
    tol = settings.DEFAULT_TOL if tol is None else tol
    tie = settings.TIE_FACTOR * tol
    lam = g.discount
    ys = g.opponent_actions[s]
    low = {y: lam * b.lower[g.transition[s][(x, y)]] + g.rescaled[s][(x, y)] for y in ys}
    high = {y: lam * b.upper[g.transition[s][(x, y)]] + g.rescaled[s][(x, y)] for y in ys}
    top = max(low.values())
    bottom = min(high.values())
    y_plus = next(y for y in ys if low[y] >= top - tie)
    y_minus = next(y for y in ys if high[y] <= bottom + tie)
    return Replies(y_plus=y_plus, y_minus=y_minus)


def check_inequality(
    g: GameGraph,
    b: Bounds,
    s: StateId,
    x: Action,
    tol: Optional[float] = None,
) -> bool:
    """True iff the left objective of x does not exceed its right objective (with slack)."""
    tol = settings.DEFAULT_TOL if tol is None else tol
    slack = settings.INEQUALITY_FACTOR * tol
    return left_objective(g, b, s, x) <= right_objective(g, b, s, x) + slack


def prune_with_record(
    g: GameGraph,
    supp: Support,
    offending: Iterable[Tuple[StateId, Action]],
) -> Tuple[Support, List[Tuple[StateId, Action]]]:
    """
    Remove offending actions and cascade through emptied states.

    Returns:
        The pruned support and every (state, action) removed, cascades included
    """
    actions: Dict[StateId, List[Action]] = {s: list(supp[s]) for s in supp.states}
    removed: List[Tuple[StateId, Action]] = []

    for s, x in offending:
        if s in actions and x in actions[s]:
            actions[s].remove(x)
            removed.append((s, x))

    changed = True
    while changed:
        changed = False
        for s in [s for s, xs in actions.items() if not xs]:
            del actions[s]
            changed = True
        for p, xs in actions.items():
            keep = [
                x for x in xs
                if all(g.transition[p][(x, y)] in actions for y in g.opponent_actions[p])
            ]
            if len(keep) != len(xs):
                removed.extend((p, x) for x in xs if x not in keep)
                actions[p] = keep
                changed = True

    return Support({s: tuple(xs) for s, xs in actions.items()}), removed


def prune(g: GameGraph, supp: Support, offending: Iterable[Tuple[StateId, Action]]) -> Support:
    """Pruned subgraph after removing ``offending`` (possibly empty)."""
    pruned, _ = prune_with_record(g, supp, offending)
    return pruned


def _empty_report(g, supp, traces, pruned, tol, runtime) -> SolveReport:
    logger.warning("Pruning emptied the game graph", pruned=len(pruned))
    return SolveReport(
        status=SolveStatus.EMPTY,
        support=supp,
        bounds=Bounds({}, {}),
        x_minus={},
        x_plus={},
        replies={},
        cornered=(),
        longest_chain=0,
        cornered_cycle=False,
        traces=traces,
        pruned_actions=pruned,
        tol=tol,
        discount=g.discount,
        start=g.start,
        start_pruned=True,
        runtime_estimate=runtime,
        diagnostics=["pruning removed every state"],
    )


def solve(
    g: GameGraph,
    tol: Optional[float] = None,
    max_outer: Optional[int] = None,
    max_iter: Optional[int] = None,
    init: InitMode = InitMode.STANDARD,
) -> SolveReport:
    """
    Alternate bound iteration and inequality-driven pruning to a fixed support.

    Args:
        g: Validated game
        tol: Solver tolerance
        max_outer: Outer round budget, total autocrat action count + 1 by default
        max_iter: Per-round sweep budget
        init: Initialisation of every bound iteration

    Returns:
        SolveReport with status Solved or Empty

    Raises:
        NonConvergenceError: the outer budget ran out
    """
    started = time.perf_counter()
    tol = settings.DEFAULT_TOL if tol is None else tol
    max_outer = g.action_count() + 1 if max_outer is None else max_outer
    runtime = runtime_estimate(g, tol)

    supp = Support.full(g)
    traces: List[IterationTrace] = []
    pruned: List[PrunedAction] = []

    for outer in range(max_outer):
        if supp.is_empty:
            return _empty_report(g, supp, traces, pruned, tol, runtime)

        bounds, trace = iterate_bounds(g, supp, init=init, tol=tol, max_iter=max_iter)
        traces.append(trace)

        extremal = {s: extremal_actions(g, supp, bounds, s, tol) for s in supp.states}
        offending = [
            (s, x)
            for s, (xm, xp) in extremal.items()
            for x in dict.fromkeys(xm + xp)
            if not check_inequality(g, bounds, s, x, tol)
        ]
        if offending:
            supp, removed = prune_with_record(g, supp, offending)
            pruned.extend(PrunedAction(s, x, outer) for s, x in removed)
            logger.debug("Pruned support", outer_round=outer, removed=len(removed), states=len(supp))
            continue

        cornered = tuple(
            s for s in supp.states
            if len(supp[s]) == 1 and extremal[s][0][0] == extremal[s][1][0]
        )
        chain, cyclic = longest_chain(g, supp, cornered)
        diagnostics: List[str] = []
        if cyclic:
            diagnostics.append(f"cornered states contain a cycle; L set to its length {chain}")
        start_pruned = g.start not in supp
        if start_pruned:
            diagnostics.append(f"start state {g.start!r} was pruned")
            logger.warning("Start state pruned", start=g.start)

        report = SolveReport(
            status=SolveStatus.SOLVED,
            support=supp,
            bounds=bounds,
            x_minus={s: xm for s, (xm, _) in extremal.items()},
            x_plus={s: xp for s, (_, xp) in extremal.items()},
            replies={
                s: {x: unenforcing_replies(g, bounds, s, x, tol) for x in supp[s]}
                for s in supp.states
            },
            cornered=cornered,
            longest_chain=chain,
            cornered_cycle=cyclic,
            traces=traces,
            pruned_actions=pruned,
            tol=tol,
            discount=g.discount,
            start=g.start,
            start_pruned=start_pruned,
            runtime_estimate=runtime,
            diagnostics=diagnostics,
        )
        log_solve_event(
            logger,
            status=report.status.value,
            outer_rounds=len(traces),
            iterations=report.iterations,
            pruned=len(pruned),
            elapsed_ms=(time.perf_counter() - started) * 1000,
        )
        return report

    if supp.is_empty:
        return _empty_report(g, supp, traces, pruned, tol, runtime)
    raise NonConvergenceError(f"pruning did not settle within {max_outer} outer rounds")


def classify_value(
    rep: SolveReport,
    s: StateId,
    v: float,
    tol: Optional[float] = None,
) -> ValueClass:
    """
    Place a candidate target relative to the enforceable interval of ``s``.

    Raises:
        PrunedStateError: ``s`` did not survive pruning
    """
    if not rep.survives(s):
        raise PrunedStateError(s)
    tol = rep.tol if tol is None else tol
    m, M = rep.interval(s)
    if v < m - tol:
        return ValueClass.LEFT_UNENFORCEABLE
    if v > M + tol:
        return ValueClass.RIGHT_UNENFORCEABLE
    return ValueClass.ENFORCEABLE


def right_excludable(rep: SolveReport, s: StateId, v: float, tol: Optional[float] = None) -> bool:
    """Values below m_s are both left unenforceable and right excludable."""
    return classify_value(rep, s, v, tol) is ValueClass.LEFT_UNENFORCEABLE


def sweep_lambda(g: GameGraph, grid: Sequence, tol: Optional[float] = None) -> List[SolveReport]:
    """Solve the same game at every discount of ``grid``, in grid order."""
    return [solve(with_discount(g, lam), tol=tol) for lam in grid]
