"""
Pytest configuration and fixtures for backend tests.

This file provides the bundled games, their solved reports and a random
game factory used across all backend tests.
"""

from pathlib import Path

import numpy as np
import pytest

from autocrat.core.logging import setup_logging
from autocrat.services.fixtures import random_game
from autocrat.services.game_graph import load_game
from autocrat.services.solver import solve

FIXTURES_DIR = Path(__file__).resolve().parents[1] / "fixtures"


@pytest.fixture(scope="session", autouse=True)
def configure_logging():
    """Route structured logs through stdlib logging on stderr."""
    setup_logging()


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR


def _load(name: str):
    return load_game((FIXTURES_DIR / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fix_a():
    """One state, one edge, U=5, lambda=1/2."""
    return _load("fix_a.json")


@pytest.fixture(scope="session")
def fix_b():
    """Two-state donation game, B=4 b=2 c=1, lambda=0.9."""
    return _load("fix_b.json")


@pytest.fixture(scope="session")
def fix_c():
    """Cornered chain with n=2, lambda=1/2."""
    return _load("fix_c.json")


@pytest.fixture(scope="session")
def rep_a(fix_a):
    return solve(fix_a)


@pytest.fixture(scope="session")
def rep_b(fix_b):
    return solve(fix_b)


@pytest.fixture(scope="session")
def rep_c(fix_c):
    return solve(fix_c)


@pytest.fixture
def random_games():
    """Factory: ``random_games(count, seed)`` yields reproducible random games."""

    def make(count: int, seed: int = 0, discounts=("3/10", "3/5", "9/10"), max_states=6, max_actions=4):
        rng = np.random.Generator(np.random.Philox(seed))
        return [
            random_game(rng, max_states=max_states, max_actions=max_actions, discount=discounts[i % len(discounts)])
            for i in range(count)
        ]

    return make
