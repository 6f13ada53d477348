"""
Autocrat - Command Line Parser
"""

import argparse
from fractions import Fraction
from typing import List

from autocrat.core.config import settings


def discount_arg(text: str) -> Fraction:
    """A discount factor read exactly, strictly inside (0, 1)."""
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"lambda must lie in (0, 1), got {text}")
    return value


def lambda_grid(text: str) -> List[Fraction]:
    """
    Parse ``start:stop:step`` (inclusive) or a comma list of discounts.

    Grid points are exact, so 0.40:0.95:0.05 yields 12 points.
    """
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("grid must be start:stop:step")
        try:
            start, stop, step = (Fraction(p.strip()) for p in parts)
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
        if step <= 0:
            raise argparse.ArgumentTypeError("grid step must be positive")
        grid = []
        value = start
        while value <= stop:
            grid.append(value)
            value += step
    else:
        grid = [Fraction(p.strip()) for p in text.split(",") if p.strip()]
    if not grid:
        raise argparse.ArgumentTypeError("empty lambda grid")
    for value in grid:
        if not 0 < value < 1:
            raise argparse.ArgumentTypeError(f"lambda must lie in (0, 1), got {value}")
    return grid


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=settings.DEFAULT_TOL, help="solver tolerance")
    common.add_argument("--max-iter", type=int, default=None, help="sweep budget per bound iteration")
    common.add_argument("--lambda", dest="discount", type=discount_arg, default=None, help="override the game's discount")
    common.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    common.add_argument("--episodes", type=int, default=settings.DEFAULT_EPISODES)
    common.add_argument("--horizon", type=int, default=settings.DEFAULT_HORIZON, help="oracle enumeration depth")
    common.add_argument("--confidence", type=float, default=settings.CONFIDENCE)
    common.add_argument("--format", choices=("text", "json"), default=settings.OUTPUT_FORMAT)
    common.add_argument("--trace", action="store_true", help="include iteration traces")
    common.add_argument("--exact", action="store_true", help="recover and certify exact rational endpoints")
    common.add_argument("--init", choices=("standard", "swapped"), default="standard")
    common.add_argument("--strict", action="store_true", help="exit 3 when pruning empties the game")
    common.add_argument("-o", "--output", default=None, help="write the result to this file")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="autocrat",
        description="Enforceable values and autocratic strategies for multi-state discounted games.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a game file")
    p.add_argument("game")

    p = sub.add_parser("solve", parents=[common], help="compute enforceable intervals")
    p.add_argument("game")

    p = sub.add_parser("synthesize", parents=[common], help="write an autocratic strategy")
    p.add_argument("game")
    p.add_argument("--start", default=None, help="start state (the game's start by default)")
    p.add_argument("--value", type=float, default=None, help="target value (interval midpoint by default)")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo play of a strategy")
    p.add_argument("game")
    p.add_argument("spec")
    p.add_argument("--opponent", default="uniform", help="opponent policy token")

    p = sub.add_parser("verify", parents=[common], help="verify enforcement")
    p.add_argument("game")
    p.add_argument("spec", nargs="?", default=None, help="strategy file; synthesize per target when omitted")
    p.add_argument("--opponent", action="append", default=None, help="policy token, repeatable (default: full suite)")
    p.add_argument("--start", default=None)
    p.add_argument("--targets", default=None, help="comma-separated target values")

    p = sub.add_parser("sweep", parents=[common], help="solve over a grid of discounts")
    p.add_argument("game")
    p.add_argument("--lambdas", type=lambda_grid, required=True, help="start:stop:step or comma list")

    return parser
