"""
Autocrat - Game Graph Service

Loads, validates and serializes game files, and exposes the graph queries
and the dense array form the solver runs on.
"""

import json
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Dict, List, Set, Tuple, Union

import networkx as nx
import numpy as np
import structlog
from pydantic import ValidationError

from autocrat.core.exceptions import (
    GameParseError,
    GameValidationError,
    UnknownActionError,
    UnknownStateError,
)
from autocrat.models.game import GameGraph, StateId, UtilityBounds, Violation
from autocrat.models.solver import Support
from autocrat.schemas.game import GameDocument, fraction_to_json, to_fraction

logger = structlog.get_logger(__name__)


def _reject_constant(name: str):
    raise GameParseError(f"non-finite number {name} is not allowed")


def _split_key(key: str, state: str, table: str) -> Tuple[str, str]:
    parts = key.split(",")
    if len(parts) != 2:
        raise GameParseError(
            f"key {key!r} must be 'x,y' with a single comma",
            location=f"states.{state}.{table}",
        )
    return parts[0], parts[1]


def game_from_document(doc: GameDocument) -> GameGraph:
    """
    Build an (unvalidated) GameGraph from a parsed document.

    Args:
        doc: Parsed game file

    Returns:
        GameGraph carrying exactly what the document says
    """
    transition: Dict[str, Dict[Tuple[str, str], str]] = {}
    utility: Dict[str, Dict[Tuple[str, str], Fraction]] = {}
    for s, sd in doc.states.items():
        transition[s] = {_split_key(k, s, "transitions"): t for k, t in sd.transitions.items()}
        try:
            utility[s] = {
                _split_key(k, s, "utility"): to_fraction(u) for k, u in sd.utility.items()
            }
        except (ValueError, ZeroDivisionError) as e:
            raise GameParseError(f"bad utility literal: {e}", location=f"states.{s}.utility") from e
    try:
        discount = to_fraction(doc.discount)
    except (ValueError, ZeroDivisionError) as e:
        raise GameParseError(f"bad lambda literal: {e}", location="lambda") from e
    return GameGraph(
        states=tuple(doc.states),
        autocrat_actions={s: tuple(sd.autocrat_actions) for s, sd in doc.states.items()},
        opponent_actions={s: tuple(sd.opponent_actions) for s, sd in doc.states.items()},
        transition=transition,
        utility_exact=utility,
        discount_exact=discount,
        start=doc.start,
        name=doc.name or "",
    )


def parse_game(source: Union[str, bytes]) -> GameGraph:
    """Parse a game document without checking the graph invariants."""
    try:
        data = json.loads(source, parse_float=Decimal, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise GameParseError(e.msg, location=f"line {e.lineno} column {e.colno}") from e
    if not isinstance(data, dict):
        raise GameParseError("top level must be an object", location="$")
    try:
        doc = GameDocument.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(p) for p in first["loc"])
        raise GameParseError(first["msg"], location=location) from e
    return game_from_document(doc)


def load_game(source: Union[str, bytes]) -> GameGraph:
    """
    Parse and validate a game document.

    Args:
        source: UTF-8 JSON text following the game file schema

    Returns:
        Validated GameGraph

    Raises:
        GameParseError: malformed JSON or schema mismatch
        GameValidationError: a GameGraph invariant does not hold
    """
    g = parse_game(source)
    violations = validate(g)
    if violations:
        raise GameValidationError(violations)
    logger.debug("Game loaded", states=len(g.states), discount=str(g.discount_exact))
    return g


def dump_game(g: GameGraph) -> str:
    """Serialize a game back to the game file schema, losslessly."""
    doc = {
        "lambda": fraction_to_json(g.discount_exact),
        "start": g.start,
        "states": {
            s: {
                "autocrat_actions": list(g.autocrat_actions[s]),
                "opponent_actions": list(g.opponent_actions[s]),
                "transitions": {f"{x},{y}": t for (x, y), t in g.transition[s].items()},
                "utility": {f"{x},{y}": fraction_to_json(u) for (x, y), u in g.utility_exact[s].items()},
            }
            for s in g.states
        },
    }
    if g.name:
        doc["name"] = g.name
    return json.dumps(doc, indent=2)


def validate(g: GameGraph) -> List[Violation]:
    """
    Check every GameGraph invariant.

    Returns:
        Empty list iff the game is well formed; otherwise one entry per problem
    """
    violations: List[Violation] = []
    declared = set(g.states)

    if not 0 < g.discount_exact < 1:
        violations.append(Violation("discount out of (0,1)"))
    elif not 0.0 < _as_float(g.discount_exact) < 1.0:
        violations.append(Violation("discount not representable as a float in (0,1)"))
    if len(declared) != len(g.states):
        violations.append(Violation("duplicate state name"))
    if g.start not in declared:
        violations.append(Violation("start state undeclared", state=g.start))

    for s in g.states:
        if not s:
            violations.append(Violation("empty state name"))
        xs = g.autocrat_actions.get(s, ())
        ys = g.opponent_actions.get(s, ())
        if not xs or not ys:
            violations.append(Violation("state has no outgoing edge", state=s))
        for player, acts in (("autocrat", xs), ("opponent", ys)):
            if len(set(acts)) != len(acts):
                violations.append(Violation(f"duplicate {player} action", state=s))
            for a in acts:
                if "," in a or not a:
                    violations.append(Violation(f"bad {player} action name {a!r}", state=s))

        product = {(x, y) for x in xs for y in ys}
        for table_name, table in (("transition", g.transition.get(s, {})), ("utility", g.utility_exact.get(s, {}))):
            keys = set(table)
            for x, y in sorted(product - keys):
                violations.append(Violation(f"missing {table_name}", state=s, edge=f"{x},{y}"))
            for x, y in sorted(keys - product):
                violations.append(Violation(f"extra {table_name}", state=s, edge=f"{x},{y}"))

        for (x, y), target in g.transition.get(s, {}).items():
            if target not in declared:
                violations.append(Violation("dangling target", state=s, edge=f"{x},{y}"))
        for (x, y), u in g.utility_exact.get(s, {}).items():
            if not math.isfinite(_as_float(u)):
                violations.append(Violation("non-finite utility", state=s, edge=f"{x},{y}"))

    return violations


def _as_float(value: Fraction) -> float:
    try:
        return float(value)
    except OverflowError:
        return math.inf


def _check_state(g: GameGraph, s: StateId) -> None:
    if s not in g.autocrat_actions:
        raise UnknownStateError(s)


def rescaled_utility(g: GameGraph, s: StateId, x: str, y: str) -> float:
    """U_lambda(x, y; s) = (1 - lambda) * U(x, y; s)."""
    _check_state(g, s)
    if x not in g.autocrat_actions[s]:
        raise UnknownActionError(s, x, "autocrat")
    if y not in g.opponent_actions[s]:
        raise UnknownActionError(s, y, "opponent")
    return g.rescaled[s][(x, y)]


def utility_bounds(g: GameGraph) -> UtilityBounds:
    values = [u for table in g.utility.values() for u in table.values()]
    return UtilityBounds(m0=min(values), M0=max(values))


def children(g: GameGraph, s: StateId) -> Set[StateId]:
    _check_state(g, s)
    return set(g.transition[s].values())


def parents(g: GameGraph, s: StateId) -> Set[StateId]:
    _check_state(g, s)
    return {p for p in g.states if s in g.transition[p].values()}


def with_discount(g: GameGraph, discount: Union[Fraction, Decimal, str, int, float]) -> GameGraph:
    """Copy of ``g`` with another discount factor in (0, 1)."""
    lam = to_fraction(discount)
    if not 0 < lam < 1:
        raise ValueError(f"discount {discount} out of (0,1)")
    return g.with_discount(lam)


@dataclass(frozen=True)
class GameArrays:
    """
    Dense form of a game restricted to a support.

    ``successor[i, a, b]`` and ``reward[i, a, b]`` hold T and U_lambda for the
    a-th declared autocrat action and b-th opponent action of state i; padding
    entries are masked out by ``xmask`` and ``ymask``.
    """

    states: Tuple[StateId, ...]
    successor: np.ndarray
    reward: np.ndarray
    xmask: np.ndarray
    ymask: np.ndarray
    active: np.ndarray
    discount: float


def compile_arrays(g: GameGraph, supp: Support) -> GameArrays:
    """
    Lay the game out as padded numpy arrays for a vectorised sweep.

    Raises:
        ValueError: a surviving edge leads to a state outside the support
    """
    n = len(g.states)
    xmax = max(len(g.autocrat_actions[s]) for s in g.states)
    ymax = max(len(g.opponent_actions[s]) for s in g.states)
    successor = np.zeros((n, xmax, ymax), dtype=np.intp)
    reward = np.zeros((n, xmax, ymax), dtype=float)
    xmask = np.zeros((n, xmax), dtype=bool)
    ymask = np.zeros((n, ymax), dtype=bool)
    active = np.zeros(n, dtype=bool)
    index = g.state_index

    for i, s in enumerate(g.states):
        ymask[i, : len(g.opponent_actions[s])] = True
        if s not in supp:
            continue
        active[i] = True
        allowed = set(supp[s])
        for a, x in enumerate(g.autocrat_actions[s]):
            xmask[i, a] = x in allowed
            for b, y in enumerate(g.opponent_actions[s]):
                target = g.transition[s][(x, y)]
                if x in allowed and target not in supp:
                    raise ValueError(f"edge ({x},{y}) of {s} leaves the support")
                successor[i, a, b] = index[target]
                reward[i, a, b] = g.rescaled[s][(x, y)]

    return GameArrays(
        states=g.states,
        successor=successor,
        reward=reward,
        xmask=xmask,
        ymask=ymask,
        active=active,
        discount=g.discount,
    )


def support_digraph(g: GameGraph, supp: Support) -> nx.DiGraph:
    """Directed graph of the edges that survive in ``supp``."""
    graph = nx.DiGraph()
    graph.add_nodes_from(supp.states)
    for s in supp.states:
        for x in supp[s]:
            for y in g.opponent_actions[s]:
                graph.add_edge(s, g.transition[s][(x, y)])
    return graph


def longest_chain(g: GameGraph, supp: Support, members) -> Tuple[int, bool]:
    """
    Longest directed path, counted in states, inside ``members``.

    Returns:
        (length, cyclic); when the members contain a cycle the length is the
        longest simple cycle and ``cyclic`` is True
    """
    sub = support_digraph(g, supp).subgraph(members)
    if sub.number_of_nodes() == 0:
        return 0, False
    if nx.is_directed_acyclic_graph(sub):
        return len(nx.dag_longest_path(sub)), False
    return max(len(c) for c in nx.simple_cycles(sub)), True
