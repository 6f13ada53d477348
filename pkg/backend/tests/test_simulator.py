"""
Tests for the Monte Carlo simulator, the enumeration oracle and the
verification harness.
"""

import numpy as np
import pytest

from autocrat.core.exceptions import HorizonTooLargeError, UnknownActionError, UnknownStateError
from autocrat.services.simulator import (
    AdversarialHighPolicy,
    AdversarialLowPolicy,
    FixedPolicy,
    ScriptedPolicy,
    SeededRandomPolicy,
    UniformPolicy,
    deterministic_policies,
    episode_rng,
    exact_expectation,
    parse_policy,
    run_episode,
    simulate,
    verify_enforcement,
    verify_spec,
)
from autocrat.services.strategy import synthesize

# strict enough that a seeded run practically never misses
CONFIDENCE = 0.9999


@pytest.fixture(scope="module")
def spec_b(fix_b, rep_b):
    return synthesize(rep_b, fix_b, v=1.1)


def _targets(rep):
    m, M = rep.interval("H")
    return [m, (m + M) / 2, M]


@pytest.mark.unit
class TestPolicies:
    """Test opponent policies and their tokens."""

    def test_parse_tokens(self, fix_b):
        assert isinstance(parse_policy("uniform", fix_b), UniformPolicy)
        assert isinstance(parse_policy("adversarial-low", fix_b), AdversarialLowPolicy)
        assert isinstance(parse_policy("adversarial-high", fix_b), AdversarialHighPolicy)
        assert parse_policy("fixed:0", fix_b).name == "fixed:0"
        assert parse_policy("fixed:H=1,L=0", fix_b).name == "fixed:H=1,L=0"
        scripted = parse_policy("scripted:0,1", fix_b)
        assert isinstance(scripted, ScriptedPolicy)
        assert scripted.sequence == ("0", "1")
        assert isinstance(parse_policy("random:7", fix_b), SeededRandomPolicy)

    def test_parse_rejects(self, fix_b):
        with pytest.raises(ValueError):
            parse_policy("bogus", fix_b)
        with pytest.raises(ValueError):
            parse_policy("fixed:", fix_b)
        with pytest.raises(UnknownActionError):
            parse_policy("fixed:9", fix_b)
        with pytest.raises(UnknownStateError):
            parse_policy("fixed:Z=0", fix_b)

    def test_per_state_replies(self, fix_b):
        policy = FixedPolicy(fix_b, per_state={"L": "1"})
        assert policy.replies == {"H": "0", "L": "1"}
        assert policy.choose("L", 3, ("0", "1", 0.5), None) == "1"

    def test_scripted_cycles(self, fix_b):
        policy = ScriptedPolicy(fix_b, ["1", "0", "0"])
        assert [policy.choose("H", k, None, None) for k in range(5)] == ["1", "0", "0", "1", "0"]

    def test_random_policy_is_seeded(self, fix_b):
        a = SeededRandomPolicy(fix_b, 3)
        b = SeededRandomPolicy(fix_b, 3)
        for s in fix_b.states:
            assert np.array_equal(a.cumulative[s], b.cumulative[s])
            assert a.cumulative[s][-1] == pytest.approx(1.0)

    def test_deterministic_suite(self, fix_b):
        suite = deterministic_policies(fix_b)
        assert len(suite) == 6
        assert all(p.deterministic for p in suite)
        assert {p.name for p in suite[-2:]} == {"adversarial-low", "adversarial-high"}

    def test_adversaries_pick_extremes(self, fix_b, spec_b):
        low = AdversarialLowPolicy(fix_b)
        high = AdversarialHighPolicy(fix_b)
        low.prepare(spec_b)
        high.prepare(spec_b)
        # against a pure donation in H, defecting is the argmax on the m side and the argmin on the M side
        assert low.choose("H", 0, ("0", "1", 1.0), None) == "0"
        assert high.choose("H", 0, ("0", "1", 1.0), None) == "0"


@pytest.mark.unit
class TestEpisodes:
    """Test single playouts."""

    def test_trivial_totals(self, fix_a, rep_a):
        spec = synthesize(rep_a, fix_a)
        for i in range(50):
            result = run_episode(fix_a, spec, UniformPolicy(fix_a), episode_rng(7, i))
            assert result.rounds >= 1
            assert result.total_rescaled == pytest.approx(2.5 * result.rounds)
            assert result.total_utility == pytest.approx(5.0 * result.rounds)

    def test_trajectory(self, fix_b, spec_b):
        result = run_episode(fix_b, spec_b, UniformPolicy(fix_b), episode_rng(1, 0), keep_trajectory=True)
        assert len(result.trajectory) == result.rounds
        assert result.trajectory[0].state == "H"
        assert result.trajectory[0].target == spec_b.v0

    def test_substreams_differ(self):
        a = episode_rng(5, 0).random(4)
        b = episode_rng(5, 1).random(4)
        assert not np.array_equal(a, b)
        assert np.array_equal(a, episode_rng(5, 0).random(4))


@pytest.mark.unit
class TestSimulate:
    """Test Monte Carlo reports."""

    def test_trivial_interval_covers_five(self, fix_a, rep_a):
        spec = synthesize(rep_a, fix_a)
        sim = simulate(fix_a, spec, UniformPolicy(fix_a), episodes=4000, seed=0, confidence=CONFIDENCE)
        assert sim.covers(5.0)
        assert sim.mean == pytest.approx(2.5 * sim.mean_rounds)
        assert sim.clamps == 0

    def test_seed_determinism(self, fix_b, spec_b):
        first = simulate(fix_b, spec_b, UniformPolicy(fix_b), episodes=1500, seed=42)
        second = simulate(fix_b, spec_b, UniformPolicy(fix_b), episodes=1500, seed=42)
        assert first == second
        other = simulate(fix_b, spec_b, UniformPolicy(fix_b), episodes=1500, seed=43)
        assert other.mean != first.mean

    def test_thread_count_does_not_matter(self, fix_b, spec_b):
        one = simulate(fix_b, spec_b, UniformPolicy(fix_b), episodes=1500, seed=9, threads=1)
        four = simulate(fix_b, spec_b, UniformPolicy(fix_b), episodes=1500, seed=9, threads=4)
        assert one.mean == four.mean
        assert one.stderr == four.stderr
        assert one.mean_rounds == four.mean_rounds

    def test_geometric_horizon(self, fix_b, spec_b):
        sim = simulate(fix_b, spec_b, UniformPolicy(fix_b), episodes=5000, seed=3)
        assert abs(sim.mean_rounds - 10.0) <= 3 * sim.rounds_stderr

    def test_interval_width_follows_confidence(self, fix_b, spec_b):
        wide = simulate(fix_b, spec_b, UniformPolicy(fix_b), episodes=500, seed=1, confidence=0.999)
        narrow = simulate(fix_b, spec_b, UniformPolicy(fix_b), episodes=500, seed=1, confidence=0.9)
        assert wide.ci99[1] - wide.ci99[0] > narrow.ci99[1] - narrow.ci99[0]

    def test_interval_width_shrinks_with_episodes(self, fix_b, spec_b):
        """Four times the episodes halves the interval."""
        small = simulate(fix_b, spec_b, UniformPolicy(fix_b), episodes=1000, seed=5, confidence=0.99)
        large = simulate(fix_b, spec_b, UniformPolicy(fix_b), episodes=4000, seed=5, confidence=0.99)
        small_width = small.ci99[1] - small.ci99[0]
        large_width = large.ci99[1] - large.ci99[0]
        assert small_width / large_width == pytest.approx(2.0, rel=0.25)

    def test_mean_does_not_depend_on_policy(self, fix_b, spec_b):
        """Every pair of policy intervals overlaps."""
        tokens = ["uniform", "fixed:0", "fixed:1", "adversarial-low", "adversarial-high", "random:2"]
        intervals = [
            simulate(fix_b, spec_b, parse_policy(t, fix_b), episodes=3000, seed=17, confidence=CONFIDENCE).ci99
            for t in tokens
        ]
        for i, (lo_a, hi_a) in enumerate(intervals):
            for lo_b, hi_b in intervals[i + 1 :]:
                assert max(lo_a, lo_b) <= min(hi_a, hi_b) + 1e-12

    def test_rejects_zero_episodes(self, fix_b, spec_b):
        with pytest.raises(ValueError):
            simulate(fix_b, spec_b, UniformPolicy(fix_b), episodes=0)

    @pytest.mark.parametrize("policy", ["uniform", "fixed:1", "adversarial-high", "random:2"])
    def test_donation_enforced(self, fix_b, rep_b, policy):
        for target in _targets(rep_b):
            spec = synthesize(rep_b, fix_b, v=target)
            sim = simulate(fix_b, spec, parse_policy(policy, fix_b), episodes=3000, seed=11, confidence=CONFIDENCE)
            assert sim.covers(spec.v0)


@pytest.mark.unit
class TestExactExpectation:
    """Test the finite-horizon enumeration oracle."""

    def test_trivial_zero_horizon(self, fix_a, rep_a):
        spec = synthesize(rep_a, fix_a)
        assert exact_expectation(fix_a, spec, FixedPolicy(fix_a), horizon=0) == (5.0, 5.0)

    @pytest.mark.parametrize("horizon", [0, 5, 20, 40])
    def test_width_is_tail_bound(self, fix_b, spec_b, horizon):
        lo, hi = exact_expectation(fix_b, spec_b, FixedPolicy(fix_b, "0"), horizon=horizon)
        assert hi - lo == pytest.approx(5 * 0.9 ** (horizon + 1))

    def test_contains_target(self, fix_b, rep_b):
        """Test every deterministic opponent is held to every target."""
        for target in _targets(rep_b):
            spec = synthesize(rep_b, fix_b, v=target)
            for policy in deterministic_policies(fix_b):
                lo, hi = exact_expectation(fix_b, spec, policy, horizon=20)
                assert lo - spec.drift <= spec.v0 <= hi + spec.drift

    def test_chain_contains_target(self, fix_c, rep_c):
        spec = synthesize(rep_c, fix_c)
        for policy in deterministic_policies(fix_c):
            lo, hi = exact_expectation(fix_c, spec, policy, horizon=30)
            assert lo - spec.drift <= spec.v0 <= hi + spec.drift

    def test_budget(self, fix_b, spec_b):
        with pytest.raises(HorizonTooLargeError):
            exact_expectation(fix_b, spec_b, FixedPolicy(fix_b, "0"), horizon=10, budget=1)

    def test_rejects_random_policy(self, fix_b, spec_b):
        with pytest.raises(ValueError):
            exact_expectation(fix_b, spec_b, UniformPolicy(fix_b), horizon=3)

    def test_rejects_negative_horizon(self, fix_b, spec_b):
        with pytest.raises(ValueError):
            exact_expectation(fix_b, spec_b, FixedPolicy(fix_b), horizon=-1)


@pytest.mark.unit
class TestVerification:
    """Test verdict tables."""

    def test_trivial_passes(self, fix_a, rep_a):
        table = verify_enforcement(
            fix_a, rep_a, None, [5.0], [UniformPolicy(fix_a), FixedPolicy(fix_a)],
            episodes=2000, seed=0, confidence=CONFIDENCE,
        )
        assert table.passed
        assert table.seed == 0
        assert [row.policy for row in table.rows] == ["uniform", "fixed:s=e"]
        assert table.rows[1].oracle_lo == pytest.approx(5.0)

    def test_corrupted_bound_fails(self, fix_b, rep_b):
        """Test an inflated right endpoint is caught."""
        spec = synthesize(rep_b, fix_b, v=rep_b.interval("H")[1])
        bad_l = spec.states["L"].model_copy(update={"M": 2.5})
        bad = spec.model_copy(update={"states": {**spec.states, "L": bad_l}})
        rows = verify_spec(fix_b, bad, deterministic_policies(fix_b), episodes=200, seed=0, horizon=10)
        assert not all(row.passed for row in rows)
        assert any(row.error for row in rows)

    def test_row_alias(self, fix_a, rep_a):
        table = verify_enforcement(fix_a, rep_a, "s", [5.0], [FixedPolicy(fix_a)], episodes=100, seed=1, confidence=CONFIDENCE)
        doc = table.rows[0].model_dump(by_alias=True)
        assert doc["pass"] is True


@pytest.mark.slow
class TestLongRuns:
    """Full-size Monte Carlo checks."""

    def test_donation_suite(self, fix_b, rep_b):
        policies = [UniformPolicy(fix_b)] + deterministic_policies(fix_b)
        table = verify_enforcement(
            fix_b, rep_b, "H", _targets(rep_b), policies,
            episodes=100_000, seed=0, horizon=40, confidence=CONFIDENCE,
        )
        assert table.passed

    def test_chain_suite(self, fix_c, rep_c):
        policies = [UniformPolicy(fix_c), SeededRandomPolicy(fix_c, 1)] + deterministic_policies(fix_c)
        m, M = rep_c.interval("s0")
        table = verify_enforcement(
            fix_c, rep_c, "s0", [m, (m + M) / 2, M], policies,
            episodes=100_000, seed=0, confidence=CONFIDENCE,
        )
        assert table.passed
