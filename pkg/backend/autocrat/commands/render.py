"""
Autocrat - Output Rendering

Converts domain results into their JSON documents and into rich tables for
the text output mode. Both modes print the same numbers.
"""

from typing import Dict, List, Optional, Sequence

from rich.console import Console
from rich.table import Table

from autocrat.models.exact import ExactBounds, Side
from autocrat.models.solver import SolveReport
from autocrat.schemas.report import (
    RepliesDocument,
    SolveReportDocument,
    StateSummary,
    SweepRow,
    TraceDocument,
)
from autocrat.schemas.simulation import SimulationReport, VerdictTable
from autocrat.services.exact import exact_document
from autocrat.services.strategy import memory_requirement


def report_document(
    rep: SolveReport,
    exact: Optional[Dict[Side, ExactBounds]] = None,
    trace: bool = False,
) -> SolveReportDocument:
    states = {}
    for s in rep.support.states:
        m, M = rep.interval(s)
        states[s] = StateSummary(
            m=m,
            M=M,
            x_minus=list(rep.x_minus[s]),
            x_plus=list(rep.x_plus[s]),
            cornered=s in rep.cornered,
            support=list(rep.support[s]),
            replies={
                x: RepliesDocument(y_plus=r.y_plus, y_minus=r.y_minus)
                for x, r in rep.replies.get(s, {}).items()
            },
        )
    traces = None
    if trace:
        traces = [
            TraceDocument(
                outer_round=k,
                init=t.init.value,
                iterations=t.iterations,
                deltas=list(t.deltas),
                m=[dict(b.lower) for b in t.snapshots],
                M=[dict(b.upper) for b in t.snapshots],
            )
            for k, t in enumerate(rep.traces)
        ]
    return SolveReportDocument(
        status=rep.status.value,
        discount=rep.discount,
        tol=rep.tol,
        start=rep.start,
        start_pruned=rep.start_pruned,
        L=rep.longest_chain,
        memory=memory_requirement(rep) if rep.solved else 0,
        cornered=list(rep.cornered),
        states=states,
        pruned_actions=[(p.state, p.action, p.outer_round) for p in rep.pruned_actions],
        iterations=rep.iterations,
        runtime_estimate=rep.runtime_estimate,
        diagnostics=list(rep.diagnostics),
        exact={side.value: exact_document(eb) for side, eb in exact.items()} if exact else None,
        trace=traces,
    )


def sweep_row(rep: SolveReport) -> SweepRow:
    return SweepRow(
        discount=rep.discount,
        status=rep.status.value,
        L=rep.longest_chain,
        intervals={s: rep.interval(s) for s in rep.support.states} if rep.solved else {},
    )


def _num(value: float) -> str:
    return f"{value:.10g}"


def print_report(console: Console, doc: SolveReportDocument) -> None:
    console.print(
        f"status: {doc.status}  lambda: {_num(doc.discount)}  L: {doc.L}  memory: {doc.memory}  "
        f"iterations: {doc.iterations}"
    )
    table = Table(title="Enforceable intervals")
    for column in ("state", "m", "M", "x_minus", "x_plus", "cornered", "support"):
        table.add_column(column)
    exact = doc.exact or {}
    for side in exact:
        table.add_column(f"exact {side}")
    for s, row in doc.states.items():
        cells = [
            s,
            _num(row.m),
            _num(row.M),
            ",".join(row.x_minus),
            ",".join(row.x_plus),
            "yes" if row.cornered else "",
            ",".join(row.support),
        ]
        for side, eb in exact.items():
            cells.append(eb.values[s] + ("" if eb.certified.get(s) else " (uncertified)"))
        table.add_row(*cells)
    console.print(table)
    if doc.cornered:
        console.print("cornered: " + ", ".join(doc.cornered))
    for state, action, outer in doc.pruned_actions:
        console.print(f"pruned {state}/{action} in round {outer}")
    for line in doc.diagnostics:
        console.print(f"note: {line}")
    for eb in exact.values():
        for line in eb.diagnostics:
            console.print(f"note: {line}")


def print_sweep(console: Console, rows: Sequence[SweepRow]) -> None:
    states: List[str] = []
    for row in rows:
        states.extend(s for s in row.intervals if s not in states)
    table = Table(title="Discount sweep")
    table.add_column("lambda")
    table.add_column("status")
    table.add_column("L")
    for s in states:
        table.add_column(f"m_{s}")
        table.add_column(f"M_{s}")
    for row in rows:
        cells = [_num(row.discount), row.status, str(row.L)]
        for s in states:
            if s in row.intervals:
                m, M = row.intervals[s]
                cells.extend((_num(m), _num(M)))
            else:
                cells.extend(("-", "-"))
        table.add_row(*cells)
    console.print(table)


def print_simulation(console: Console, rep: SimulationReport) -> None:
    lo, hi = rep.ci99
    console.print(f"seed: {rep.seed}")
    console.print(f"policy: {rep.policy}  episodes: {rep.episodes}")
    console.print(f"mean: {_num(rep.mean)}  stderr: {_num(rep.stderr)}")
    console.print(f"{rep.confidence:.4g} interval: [{_num(lo)}, {_num(hi)}]")
    console.print(f"mean rounds: {_num(rep.mean_rounds)}  clamps: {rep.clamps}")


def print_verdicts(console: Console, table_doc: VerdictTable) -> None:
    if table_doc.seed is not None:
        console.print(f"seed: {table_doc.seed}")
    table = Table(title="Verification")
    for column in ("target", "policy", "mean", "oracle", "mc", "verdict"):
        table.add_column(column)
    for row in table_doc.rows:
        oracle = "" if row.oracle_lo is None else f"[{_num(row.oracle_lo)}, {_num(row.oracle_hi)}]"
        table.add_row(
            _num(row.target),
            row.policy,
            "" if row.mean is None else _num(row.mean),
            oracle,
            "ok" if row.mc_pass else "-",
            "pass" if row.passed else f"FAIL {row.error or ''}".strip(),
        )
    console.print(table)
