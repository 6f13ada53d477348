"""
Autocrat - Bundled Games

Small reference games with known closed-form endpoints, and a generator of
random well-formed games for property tests.
"""

from fractions import Fraction
from typing import Dict, Optional, Sequence

import numpy as np

from autocrat.models.game import GameGraph
from autocrat.services.exact import cycle_value


def _frac(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(str(value))


def trivial_game(utility=5, discount=Fraction(1, 2)) -> GameGraph:
    """One state, one joint action, a self-loop."""
    return GameGraph(
        states=("s",),
        autocrat_actions={"s": ("a",)},
        opponent_actions={"s": ("e",)},
        transition={"s": {("a", "e"): "s"}},
        utility_exact={"s": {("a", "e"): _frac(utility)}},
        discount_exact=_frac(discount),
        start="s",
        name="trivial",
    )


def donation_game(B=4, b=2, c=1, discount=Fraction(9, 10)) -> GameGraph:
    """
    Two-state donation game scored by the opponent's payoff.

    Action "1" donates, "0" defects. In state H a donation is worth B to the
    receiver, in L it is worth b; donating costs c. Mutual donation moves
    the game to H, anything else to L.
    """
    B, b, c = _frac(B), _frac(b), _frac(c)
    acts = ("0", "1")
    transition = {}
    utility = {}
    for s, benefit in (("H", B), ("L", b)):
        transition[s] = {}
        utility[s] = {}
        for x in acts:
            for y in acts:
                transition[s][(x, y)] = "H" if (x, y) == ("1", "1") else "L"
                # opponent receives the autocrat's donation and pays its own
                utility[s][(x, y)] = Fraction((benefit if x == "1" else 0) - (c if y == "1" else 0))
    return GameGraph(
        states=("H", "L"),
        autocrat_actions={"H": acts, "L": acts},
        opponent_actions={"H": acts, "L": acts},
        transition=transition,
        utility_exact=utility,
        discount_exact=_frac(discount),
        start="H",
        name="donation",
    )


def cornered_chain(
    low: Sequence = (0, 2, 2),
    high: Sequence = (6, 1, 1),
    discount=Fraction(1, 2),
) -> GameGraph:
    """
    Cycle s0 -> s1 -> ... -> sn -> s0.

    In s0 the autocrat chooses between utility low[0] (action "0") and
    high[0] (action "1"); in every other state the opponent chooses between
    low[i] (reply "0") and high[i] (reply "1") while the autocrat has a
    single action.
    """
    if len(low) != len(high) or len(low) < 2:
        raise ValueError("low and high need the same length, at least 2")
    n = len(low)
    states = tuple(f"s{i}" for i in range(n))
    autocrat, opponent, transition, utility = {}, {}, {}, {}
    for i, s in enumerate(states):
        nxt = states[(i + 1) % n]
        if i == 0:
            autocrat[s], opponent[s] = ("0", "1"), ("e",)
            edges = {("0", "e"): low[0], ("1", "e"): high[0]}
        else:
            autocrat[s], opponent[s] = ("e",), ("0", "1")
            edges = {("e", "0"): low[i], ("e", "1"): high[i]}
        transition[s] = {a: nxt for a in edges}
        utility[s] = {a: _frac(u) for a, u in edges.items()}
    return GameGraph(
        states=states,
        autocrat_actions=autocrat,
        opponent_actions=opponent,
        transition=transition,
        utility_exact=utility,
        discount_exact=_frac(discount),
        start="s0",
        name="cornered-chain",
    )


def donation_endpoints(B=4, b=2, c=1, discount=Fraction(9, 10)) -> Optional[Dict[str, Fraction]]:
    """
    Closed-form endpoints of the donation game, or None.

    Two branches have a closed form. For lambda >= c/(B-b) the right
    endpoint in L is b. Below that, while lambda^2 (B-b) + lambda b >= c,
    mutual donation is sustainable and M_H = B - c.
    """
    B, b, c, lam = _frac(B), _frac(b), _frac(c), _frac(discount)
    if B <= b or not 0 < lam < 1:
        return None
    if lam >= c / (B - b) and lam * b >= (1 - lam) * c:
        return {
            "m_H": Fraction(0),
            "m_L": Fraction(0),
            "M_L": b,
            "M_H": lam * b + (1 - lam) * B,
        }
    if lam * lam * (B - b) + lam * b >= c and lam * B >= c:
        return {
            "m_H": Fraction(0),
            "m_L": Fraction(0),
            "M_L": lam * (B - c) + (1 - lam) * (b - c),
            "M_H": B - c,
        }
    return None


def chain_endpoints(
    low: Sequence = (0, 2, 2),
    high: Sequence = (6, 1, 1),
    discount=Fraction(1, 2),
) -> Dict[str, Dict[str, Fraction]]:
    """
    Exact endpoints of ``cornered_chain`` as rotated cycle values.

    Assumes low[0] <= high[0] and low[i] >= high[i] for i >= 1, so the left
    cycle collects ``low`` and the right cycle collects ``high``.
    """
    lam = _frac(discount)
    low = [_frac(u) for u in low]
    high = [_frac(u) for u in high]
    n = len(low)
    m, M = {}, {}
    for i in range(n):
        m[f"s{i}"] = cycle_value(low[i:] + low[:i], lam)
        M[f"s{i}"] = cycle_value(high[i:] + high[:i], lam)
    return {"m": m, "M": M}


def random_game(
    rng: np.random.Generator,
    max_states: int = 6,
    max_actions: int = 4,
    discount=Fraction(9, 10),
) -> GameGraph:
    """Random well-formed game with integer utilities in [-5, 5]."""
    n = int(rng.integers(1, max_states + 1))
    states = tuple(f"s{i}" for i in range(n))
    autocrat, opponent, transition, utility = {}, {}, {}, {}
    for s in states:
        xs = tuple(f"x{k}" for k in range(int(rng.integers(1, max_actions + 1))))
        ys = tuple(f"y{k}" for k in range(int(rng.integers(1, max_actions + 1))))
        autocrat[s], opponent[s] = xs, ys
        transition[s] = {(x, y): states[int(rng.integers(n))] for x in xs for y in ys}
        utility[s] = {(x, y): Fraction(int(rng.integers(-5, 6))) for x in xs for y in ys}
    return GameGraph(
        states=states,
        autocrat_actions=autocrat,
        opponent_actions=opponent,
        transition=transition,
        utility_exact=utility,
        discount_exact=_frac(discount),
        start=states[0],
        name="random",
    )

