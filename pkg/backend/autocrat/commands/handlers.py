"""
Autocrat - Command Handlers

One handler per command. Each returns the process exit code; domain
errors propagate to the entry point, which maps them to exit codes.
"""

import json
import sys
from argparse import Namespace
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel
from rich.console import Console

from autocrat.core.exceptions import (
    EXIT_OK,
    EXIT_PARSE,
    AutocratError,
    EmptyGameError,
    VerificationFailedError,
)
from autocrat.models.exact import Side
from autocrat.models.game import GameGraph
from autocrat.models.solver import InitMode
from autocrat.schemas.simulation import VerdictTable
from autocrat.schemas.strategy import StrategySpec
from autocrat.commands.render import (
    print_report,
    print_simulation,
    print_sweep,
    print_verdicts,
    report_document,
    sweep_row,
)
from autocrat.services import game_graph
from autocrat.services.exact import refine_exact
from autocrat.services.simulator import (
    UniformPolicy,
    deterministic_policies,
    parse_policy,
    simulate,
    verify_enforcement,
    verify_spec,
)
from autocrat.services.solver import solve, sweep_lambda
from autocrat.services.strategy import dump_spec, load_spec, synthesize


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise AutocratError(f"cannot read {path}: {e.strerror}") from e


def _game(args: Namespace) -> GameGraph:
    g = game_graph.load_game(_read(args.game))
    if args.discount is not None:
        g = game_graph.with_discount(g, args.discount)
    return g


def _spec(args: Namespace, g: GameGraph) -> StrategySpec:
    spec = load_spec(_read(args.spec))
    if abs(spec.discount - g.discount) > 1e-12:
        raise AutocratError(f"strategy lambda {spec.discount} does not match game lambda {g.discount}")
    return spec


def _emit(args: Namespace, console: Console, doc, text_printer=None) -> None:
    """Write a document as JSON, or as text through ``text_printer``."""
    if args.format == "json" or text_printer is None:
        if isinstance(doc, BaseModel):
            payload = doc.model_dump_json(by_alias=True, exclude_none=True, indent=2)
        else:
            payload = json.dumps(doc, indent=2)
        if args.output:
            Path(args.output).write_text(payload + "\n", encoding="utf-8")
        else:
            sys.stdout.write(payload + "\n")
        return
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            text_printer(Console(file=fh, width=console.width), doc)
    else:
        text_printer(console, doc)


def cmd_validate(args: Namespace, console: Console) -> int:
    g = game_graph.parse_game(_read(args.game))
    violations = game_graph.validate(g)
    if args.format == "json":
        sys.stdout.write(json.dumps({"valid": not violations, "violations": [str(v) for v in violations]}) + "\n")
    else:
        for v in violations:
            console.print(str(v), markup=False)
        if not violations:
            console.print(f"ok: {len(g.states)} states")
    return EXIT_OK if not violations else EXIT_PARSE


def cmd_solve(args: Namespace, console: Console) -> int:
    g = _game(args)
    rep = solve(g, tol=args.tol, max_iter=args.max_iter, init=InitMode(args.init))
    exact = None
    if args.exact and rep.solved:
        exact = {side: refine_exact(g, rep, side) for side in (Side.LEFT, Side.RIGHT)}
    _emit(args, console, report_document(rep, exact=exact, trace=args.trace), print_report)
    if args.strict and not rep.solved:
        raise EmptyGameError("pruning removed every state")
    return EXIT_OK


def cmd_synthesize(args: Namespace, console: Console) -> int:
    g = _game(args)
    rep = solve(g, tol=args.tol, max_iter=args.max_iter)
    spec = synthesize(rep, g, args.start, args.value)
    payload = dump_spec(spec)
    if args.output:
        Path(args.output).write_text(payload + "\n", encoding="utf-8")
        if args.format == "text":
            console.print(f"wrote strategy for {spec.start} (v0={spec.v0:.10g}) to {args.output}")
    else:
        sys.stdout.write(payload + "\n")
    return EXIT_OK


def cmd_simulate(args: Namespace, console: Console) -> int:
    g = _game(args)
    spec = _spec(args, g)
    opp = parse_policy(args.opponent, g)
    report = simulate(g, spec, opp, episodes=args.episodes, seed=args.seed, confidence=args.confidence)
    _emit(args, console, report, print_simulation)
    return EXIT_OK


def _targets(text: Optional[str], interval) -> List[float]:
    if text:
        return [float(t) for t in text.split(",") if t.strip()]
    m, M = interval
    return [m, (m + M) / 2, M]


def cmd_verify(args: Namespace, console: Console) -> int:
    g = _game(args)
    if args.opponent:
        policies = [parse_policy(token, g) for token in args.opponent]
    else:
        policies = [UniformPolicy(g)] + deterministic_policies(g)

    if args.spec:
        spec = _spec(args, g)
        rows = verify_spec(g, spec, policies, args.episodes, args.seed, args.horizon, args.confidence)
        table = VerdictTable(rows=rows, seed=args.seed)
    else:
        rep = solve(g, tol=args.tol, max_iter=args.max_iter)
        start = args.start or g.start
        targets = _targets(args.targets, rep.interval(start) if rep.survives(start) else (0.0, 0.0))
        table = verify_enforcement(
            g, rep, start, targets, policies, args.episodes, args.seed, args.horizon, args.confidence
        )

    _emit(args, console, table, print_verdicts)
    if not table.passed:
        failed = sum(not row.passed for row in table.rows)
        raise VerificationFailedError(f"{failed} of {len(table.rows)} verdict rows failed")
    return EXIT_OK


def cmd_sweep(args: Namespace, console: Console) -> int:
    g = game_graph.load_game(_read(args.game))
    reports = sweep_lambda(g, args.lambdas, tol=args.tol)
    rows = [sweep_row(r) for r in reports]
    if args.format == "json":
        payload = [row.model_dump(by_alias=True) for row in rows]
        _emit(args, console, payload)
    else:
        _emit(args, console, rows, print_sweep)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "synthesize": cmd_synthesize,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}
