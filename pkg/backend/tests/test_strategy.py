"""
Tests for strategy synthesis and the value-tracking controller.
"""

import json

import numpy as np
import pytest

from autocrat.core.exceptions import (
    GameParseError,
    PrunedStartError,
    TargetDriftError,
    UnknownActionError,
    UnknownStateError,
    ValueOutOfRangeError,
)
from autocrat.services.game_graph import with_discount
from autocrat.services.solver import solve
from autocrat.services.strategy import (
    Controller,
    act,
    check_spec,
    cornered_states,
    dump_spec,
    load_spec,
    memory_requirement,
    synthesize,
    update,
)


def _controller(rep, g, s0=None, v=None) -> Controller:
    return Controller(synthesize(rep, g, s0, v), g)


@pytest.mark.unit
class TestSynthesize:
    """Test building strategies from solve reports."""

    def test_defaults_to_midpoint(self, fix_b, rep_b):
        spec = synthesize(rep_b, fix_b)
        m, M = rep_b.interval("H")
        assert spec.start == "H"
        assert spec.v0 == pytest.approx((m + M) / 2)
        assert set(spec.states) == {"H", "L"}

    def test_endpoint_tables(self, fix_b, rep_b):
        spec = synthesize(rep_b, fix_b, v=1.0)
        assert spec.states["L"].x_minus == "0"
        assert spec.states["L"].x_plus == "1"
        assert spec.states["H"].M == pytest.approx(2.2, abs=1e-8)
        assert spec.drift == pytest.approx(64 * rep_b.tol / (1 - 0.9))

    def test_value_out_of_range(self, fix_b, rep_b):
        with pytest.raises(ValueOutOfRangeError) as exc:
            synthesize(rep_b, fix_b, v=9)
        assert exc.value.details["kind"] == "right unenforceable"
        with pytest.raises(ValueOutOfRangeError) as exc:
            synthesize(rep_b, fix_b, v=-1)
        assert exc.value.details["kind"] == "left unenforceable"

    def test_pruned_start(self, fix_b):
        g = with_discount(fix_b, "0.2")
        with pytest.raises(PrunedStartError):
            synthesize(solve(g), g)

    def test_unknown_start(self, fix_b, rep_b):
        with pytest.raises(UnknownStateError):
            synthesize(rep_b, fix_b, s0="Z")

    def test_value_within_tolerance_is_clamped(self, fix_b, rep_b):
        M = rep_b.interval("H")[1]
        spec = synthesize(rep_b, fix_b, v=M + rep_b.tol / 2)
        assert spec.v0 == M

    def test_cornered_flags(self, fix_c, rep_c):
        spec = synthesize(rep_c, fix_c)
        assert [s for s, e in spec.states.items() if e.cornered] == ["s1", "s2"]


@pytest.mark.unit
class TestAct:
    """Test the autocrat's mixed action."""

    def test_lower_endpoint_plays_x_minus(self, fix_b, rep_b):
        m = rep_b.interval("H")[0]
        dist = act(_controller(rep_b, fix_b, v=m))
        assert dist.probability("0") == 1.0
        assert dist.support == ("0",)

    def test_upper_endpoint_plays_x_plus(self, fix_b, rep_b):
        M = rep_b.interval("H")[1]
        dist = act(_controller(rep_b, fix_b, v=M))
        assert dist.probability("1") == 1.0

    def test_midpoint_is_even(self, fix_b, rep_b):
        dist = act(_controller(rep_b, fix_b, v=1.1))
        assert dist.probability("1") == pytest.approx(0.5, abs=1e-8)
        assert dist.probability("0") + dist.probability("1") == pytest.approx(1.0)

    def test_low_state_quarter(self, fix_b, rep_b):
        dist = act(_controller(rep_b, fix_b, s0="L", v=0.5))
        assert dist.probability("1") == pytest.approx(0.25, abs=1e-8)

    def test_trivial_single_atom(self, fix_a, rep_a):
        dist = act(_controller(rep_a, fix_a))
        assert dist.atoms == (("a", 1.0),)


@pytest.mark.unit
class TestUpdate:
    """Test the target update after each round."""

    def test_cooperate_defect_moves_to_low(self, fix_b, rep_b):
        c = _controller(rep_b, fix_b, v=rep_b.interval("H")[1])
        nxt = update(c, "1", "0")
        assert nxt.state == "L"
        assert nxt.target == pytest.approx(2.0, abs=1e-7)

    def test_mutual_cooperation_stays_high(self, fix_b, rep_b):
        c = _controller(rep_b, fix_b, v=rep_b.interval("H")[1])
        nxt = update(c, "1", "1")
        assert nxt.state == "H"
        assert nxt.target == pytest.approx(1.9 / 0.9, abs=1e-7)

    def test_update_leaves_original(self, fix_b, rep_b):
        c = _controller(rep_b, fix_b, v=1.0)
        update(c, "0", "1")
        assert c.state == "H"
        assert c.target == 1.0

    def test_trivial_fixed_point(self, fix_a, rep_a):
        c = _controller(rep_a, fix_a)
        for _ in range(5):
            c.step("a", "e")
        assert c.target == pytest.approx(5.0)
        assert c.clamps == 0

    def test_rejects_non_extremal_action(self, fix_b, rep_b):
        c = _controller(rep_b, fix_b, v=1.0)
        with pytest.raises(UnknownActionError):
            c.step("2", "0")

    def test_rejects_unknown_reply(self, fix_b, rep_b):
        c = _controller(rep_b, fix_b, v=1.0)
        with pytest.raises(UnknownActionError):
            c.step("1", "9")

    def test_cornered_rejects_other_action(self, fix_c, rep_c):
        c = _controller(rep_c, fix_c)
        c.step("1", "e")
        assert c.state == "s1"
        with pytest.raises(UnknownActionError):
            c.step("0", "0")

    def test_drift_detected(self, fix_b, rep_b):
        c = _controller(rep_b, fix_b, v=1.0)
        c.target = 3.0
        with pytest.raises(TargetDriftError):
            c.mix()

    def test_clone_is_independent(self, fix_b, rep_b):
        c = _controller(rep_b, fix_b, v=1.0)
        twin = c.clone()
        twin.step("1", "1")
        assert c.state == "H" and c.target == 1.0
        assert twin.target != 1.0


@pytest.mark.unit
class TestControllerInvariants:
    """Test conservation and interval stability of the target."""

    @pytest.mark.parametrize("name", ["b", "c"])
    def test_conservation(self, name, request):
        """Test the expected lambda*v' + U equals v for every reply."""
        g = request.getfixturevalue(f"fix_{name}")
        rep = request.getfixturevalue(f"rep_{name}")
        lam = g.discount
        for s in rep.support.states:
            m, M = rep.interval(s)
            for v in np.linspace(m, M, 7):
                c = _controller(rep, g, s0=s, v=float(v))
                dist = c.act()
                for y in g.opponent_actions[s]:
                    expected = sum(
                        p * (lam * update(c, x, y).target + g.rescaled[s][(x, y)])
                        for x, p in dist.atoms
                    )
                    assert expected == pytest.approx(c.target, abs=1e-8)

    def test_interval_stability(self, random_games):
        """Test no reachable joint action pushes the target out of its interval."""
        checked = 0
        for g in random_games(30, seed=4):
            rep = solve(g)
            if not rep.solved:
                continue
            for s in rep.support.states:
                m, M = rep.interval(s)
                for v in np.linspace(m, M, 5):
                    c = _controller(rep, g, s0=s, v=float(v))
                    for x in c.act().support:
                        for y in g.opponent_actions[s]:
                            nxt = update(c, x, y)
                            lo, hi = nxt.interval()
                            assert lo <= nxt.target <= hi
                            checked += 1
        assert checked > 0

    def test_window_determinism(self, fix_c, rep_c):
        """Test the next mix depends only on the last three rounds."""
        spec = synthesize(rep_c, fix_c)
        assert memory_requirement(rep_c) == 3
        rng = np.random.Generator(np.random.Philox(11))

        def play(c, rounds, forced=None):
            for k in range(rounds):
                xm, xp, p = c.mix()
                if forced is not None:
                    x, y = forced[k]
                else:
                    x = xp if rng.random() < p else xm
                    y = fix_c.opponent_actions[c.state][int(rng.integers(len(fix_c.opponent_actions[c.state])))]
                c.step(x, y)
            return c

        compared = 0
        for _ in range(500):
            a = play(Controller(spec, fix_c), 3 * int(rng.integers(0, 6)))
            b = play(Controller(spec, fix_c), 3 * int(rng.integers(0, 6)))
            assert a.state == b.state == "s0"
            shared = set(a.act().support) & set(b.act().support)
            if not shared:
                continue
            x = sorted(shared)[int(rng.integers(len(shared)))]
            window = [(x, "e")] + [("e", str(int(rng.integers(2)))) for _ in range(2)]
            play(a, 3, window)
            play(b, 3, window)
            assert a.state == b.state
            assert a.mix()[2] == pytest.approx(b.mix()[2], abs=1e-9)
            assert a.target == pytest.approx(b.target, abs=1e-9)
            compared += 1
        assert compared > 0


@pytest.mark.unit
class TestMemory:
    """Test cornered states and the memory requirement."""

    def test_donation_needs_one_round(self, rep_b):
        assert cornered_states(rep_b) == (set(), 0)
        assert memory_requirement(rep_b) == 1

    def test_chain(self, rep_c):
        assert cornered_states(rep_c) == ({"s1", "s2"}, 2)
        assert memory_requirement(rep_c) == 3

    def test_trivial_cycle(self, rep_a):
        assert memory_requirement(rep_a) == 2
        assert rep_a.cornered_cycle

    def test_requires_solved(self, fix_b):
        with pytest.raises(ValueError):
            memory_requirement(solve(with_discount(fix_b, "0.2")))


@pytest.mark.unit
class TestSpecFiles:
    """Test reading and writing strategy files."""

    def test_round_trip(self, fix_b, rep_b):
        spec = synthesize(rep_b, fix_b, v=1.5)
        text = dump_spec(spec)
        assert '"lambda": 0.9' in text
        assert load_spec(text) == spec

    def test_rejects_bad_target(self, fix_b, rep_b):
        doc = synthesize(rep_b, fix_b, v=1.5).model_dump(by_alias=True)
        doc["v0"] = 40.0
        with pytest.raises(GameParseError):
            load_spec(json.dumps(doc))

    def test_rejects_garbage(self):
        with pytest.raises(GameParseError):
            load_spec("{not json")

    def test_controller_checks_actions(self, fix_b, rep_b):
        spec = synthesize(rep_b, fix_b, v=1.5)
        bad = spec.model_copy(update={"states": {**spec.states, "L": spec.states["L"].model_copy(update={"x_plus": "7"})}})
        with pytest.raises(UnknownActionError):
            Controller(bad, fix_b)

    def test_controller_checks_reachable_states(self, fix_b, rep_b):
        spec = synthesize(rep_b, fix_b, v=2.2)
        missing = spec.model_copy(update={"states": {"H": spec.states["H"]}})
        with pytest.raises(GameParseError, match="'L'"):
            check_spec(missing, fix_b)
        with pytest.raises(GameParseError):
            Controller(missing, fix_b)
        check_spec(spec, fix_b)
