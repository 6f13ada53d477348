"""
Autocrat - Exact Recovery Service

Turns a converged approximate solution into exact rational endpoints by
following the chosen extremal edges: every component of that functional
graph is one cycle with trees hanging off it, and both have closed forms.
"""

from fractions import Fraction
from typing import Dict, List, Sequence

import structlog

from autocrat.core.config import settings
from autocrat.core.exceptions import TieAmbiguityError
from autocrat.models.exact import Component, ExactBounds, Side, SuccessorEdge, SuccessorGraph
from autocrat.models.game import GameGraph, StateId
from autocrat.models.solver import SolveReport
from autocrat.schemas.report import ExactBoundsDocument
from autocrat.services.solver import solve

logger = structlog.get_logger(__name__)


def cycle_value(utilities: Sequence, discount) -> Fraction:
    """Discount-weighted average of the unscaled utilities along a cycle."""
    if not utilities:
        raise ValueError("a cycle has at least one edge")
    lam = Fraction(discount)
    num = Fraction(0)
    den = Fraction(0)
    weight = Fraction(1)
    for u in utilities:
        num += weight * Fraction(u)
        den += weight
        weight *= lam
    return num / den


def branch_value(utilities: Sequence, discount, anchor) -> Fraction:
    """(1 - lambda) * sum(lambda^i U_i) + lambda^n * anchor."""
    lam = Fraction(discount)
    total = Fraction(0)
    weight = Fraction(1)
    for u in utilities:
        total += weight * Fraction(u)
        weight *= lam
    return (1 - lam) * total + weight * Fraction(anchor)


def successor_graph(g: GameGraph, rep: SolveReport, side: Side) -> SuccessorGraph:
    """
    One edge per surviving state: the representative extremal action and the
    unenforcing reply against it.
    """
    if not rep.solved:
        raise ValueError("successor graphs need a Solved report")
    edges = {}
    for s in rep.support.states:
        if side is Side.LEFT:
            x = rep.x_minus_rep(s)
            y = rep.replies[s][x].y_plus
        else:
            x = rep.x_plus_rep(s)
            y = rep.replies[s][x].y_minus
        edges[s] = SuccessorEdge(action=x, reply=y, successor=g.transition[s][(x, y)])
    return SuccessorGraph(side=side, edges=edges)


def components(sg: SuccessorGraph) -> List[Component]:
    """
    Split a functional graph into its components by pointer chasing.

    Each state is stamped once; a walk ends either on its own path (a new
    cycle) or on a stamped state (a tree joining a known component).
    """
    owner: Dict[StateId, int] = {}
    found: List[Component] = []
    for s in sg.edges:
        if s in owner:
            continue
        path: List[StateId] = []
        position: Dict[StateId, int] = {}
        cur = s
        while cur not in owner and cur not in position:
            position[cur] = len(path)
            path.append(cur)
            cur = sg.successor(cur)
        if cur in position:
            cid = len(found)
            found.append(Component(cycle=path[position[cur]:], members=list(path)))
        else:
            cid = owner[cur]
            found[cid].members.extend(path)
        for p in path:
            owner[p] = cid
    return found


def _edge_utility(g: GameGraph, sg: SuccessorGraph, s: StateId) -> Fraction:
    edge = sg.edges[s]
    return g.utility_exact[s][(edge.action, edge.reply)]


def exact_values(g: GameGraph, sg: SuccessorGraph) -> Dict[StateId, Fraction]:
    """Exact value of every state under the fixed choices of ``sg``."""
    lam = g.discount_exact
    values: Dict[StateId, Fraction] = {}
    for comp in components(sg):
        cycle_utils = [_edge_utility(g, sg, s) for s in comp.cycle]
        for i, s in enumerate(comp.cycle):
            values[s] = cycle_value(cycle_utils[i:] + cycle_utils[:i], lam)
        for s in comp.members:
            if s in values:
                continue
            branch = []
            cur = s
            while cur not in values:
                branch.append(cur)
                cur = sg.successor(cur)
            # fill from the anchor back so every branch state gets its value
            anchor = values[cur]
            for b in reversed(branch):
                anchor = branch_value([_edge_utility(g, sg, b)], lam, anchor)
                values[b] = anchor
    return values


def _equation_value(g: GameGraph, rep: SolveReport, side: Side, values, s: StateId) -> Fraction:
    lam = g.discount_exact
    scale = 1 - lam

    def edge(x, y):
        return lam * values[g.transition[s][(x, y)]] + scale * g.utility_exact[s][(x, y)]

    ys = g.opponent_actions[s]
    if side is Side.LEFT:
        return min(max(edge(x, y) for y in ys) for x in rep.support[s])
    return max(min(edge(x, y) for y in ys) for x in rep.support[s])


def certify(g: GameGraph, rep: SolveReport, side: Side, values) -> Dict[StateId, Fraction]:
    """Exact residual of the min-max (or max-min) equation per state."""
    return {s: _equation_value(g, rep, side, values, s) - values[s] for s in rep.support.states}


def _refine_once(g: GameGraph, rep: SolveReport, side: Side) -> ExactBounds:
    sg = successor_graph(g, rep, side)
    values = exact_values(g, sg)
    residuals = certify(g, rep, side, values)
    certified = {s: r == 0 for s, r in residuals.items()}
    diagnostics: List[str] = []

    approx = rep.bounds.lower if side is Side.LEFT else rep.bounds.upper
    limit = rep.tol / (1 - rep.discount)
    for s, value in values.items():
        if certified[s] and abs(float(value) - approx[s]) > limit:
            diagnostics.append(f"{s}: exact value {value} is far from approximation {approx[s]!r}")

    failed = [s for s, ok in certified.items() if not ok]
    if failed:
        s = failed[0]
        raise TieAmbiguityError(s, residuals[s])
    return ExactBounds(side=side, values=values, certified=certified, diagnostics=diagnostics)


def refine_exact(g: GameGraph, rep: SolveReport, side: Side) -> ExactBounds:
    """
    Exact endpoints on one side, certified against the exact fixed-point equation.

    A failed certificate triggers one re-solve at tol/100. If that still
    fails, residuals within the tie tolerance are reported as near-tie
    diagnostics; anything larger raises.

    Raises:
        TieAmbiguityError: the recorded arg-extremum is wrong beyond a near tie
    """
    try:
        return _refine_once(g, rep, side)
    except TieAmbiguityError as first:
        logger.warning("Exact certification failed, re-solving", state=first.state, side=side.value)

    finer = solve(g, tol=rep.tol / 100)
    try:
        return _refine_once(g, finer, side)
    except TieAmbiguityError:
        pass

    sg = successor_graph(g, finer, side)
    values = exact_values(g, sg)
    residuals = certify(g, finer, side, values)
    tie = settings.TIE_FACTOR * rep.tol
    diagnostics = []
    for s, r in residuals.items():
        if r == 0:
            continue
        if abs(r) > tie:
            raise TieAmbiguityError(s, r)
        diagnostics.append(f"{s}: near tie, exact residual {r}")
    return ExactBounds(
        side=side,
        values=values,
        certified={s: r == 0 for s, r in residuals.items()},
        diagnostics=diagnostics,
    )


def exact_document(eb: ExactBounds) -> ExactBoundsDocument:
    """Rational strings such as "27/7" per state."""
    return ExactBoundsDocument(
        side=eb.side.value,
        values={s: str(v) for s, v in eb.values.items()},
        certified=dict(eb.certified),
        diagnostics=list(eb.diagnostics),
    )
