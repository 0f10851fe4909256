"""
RunReport emission: rich tables, markdown, CSV and JSON.
"""

import csv
import io
import json
from typing import Any, Dict, List, Optional

from rich.table import Table

from ..core.stability import nodv
from ..models.core import DelayRange, HierarchyTable, RunRecord, RunReport

CSV_FIELDS = [
    "system",
    "m",
    "nus",
    "tau",
    "feasible",
    "margin",
    "iterations",
    "nodv",
    "wall_time",
    "status",
]


def records_from_range(system: str, rng: DelayRange, n_x: int) -> List[RunRecord]:
    count = nodv(n_x, rng.spec.nu1, rng.spec.m)
    return [
        RunRecord(
            system=system,
            m=rng.spec.m,
            nus=rng.spec.nus,
            tau=p.tau,
            feasible=p.feasible,
            margin=p.margin,
            iterations=p.iterations,
            nodv=count,
            wall_time=p.wall_time,
            status=p.status or "",
        )
        for p in rng.points
    ]


def _fmt_float(value: Optional[float]) -> str:
    # repr round-trips exactly
    return "" if value is None else repr(float(value))


def to_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in report.records:
        writer.writerow(
            {
                "system": r.system,
                "m": r.m,
                "nus": ";".join(str(v) for v in r.nus),
                "tau": r.tau,
                "feasible": "true" if r.feasible else "false",
                "margin": _fmt_float(r.margin),
                "iterations": r.iterations,
                "nodv": r.nodv,
                "wall_time": _fmt_float(r.wall_time),
                "status": r.status,
            }
        )
    return buf.getvalue()


def from_csv(text: str) -> List[RunRecord]:
    """Parse records written by to_csv"""
    records = []
    for row in csv.DictReader(io.StringIO(text)):
        records.append(
            RunRecord(
                system=row["system"],
                m=int(row["m"]),
                nus=tuple(int(v) for v in row["nus"].split(";") if v != ""),
                tau=int(row["tau"]),
                feasible=row["feasible"] == "true",
                margin=float(row["margin"]) if row["margin"] else None,
                iterations=int(row["iterations"]),
                nodv=int(row["nodv"]),
                wall_time=float(row["wall_time"]) if row["wall_time"] else 0.0,
                status=row["status"],
            )
        )
    return records


def to_markdown(report: RunReport) -> str:
    lines = [
        "| " + " | ".join(CSV_FIELDS) + " |",
        "|" + "|".join("---" for _ in CSV_FIELDS) + "|",
    ]
    for r in report.records:
        cells = [
            r.system,
            str(r.m),
            ",".join(str(v) for v in r.nus),
            str(r.tau),
            "yes" if r.feasible else "no",
            "" if r.margin is None else f"{r.margin:.6e}",
            str(r.iterations),
            str(r.nodv),
            f"{r.wall_time:.3f}",
            r.status,
        ]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def to_json(report: RunReport) -> str:
    payload: Dict[str, Any] = {
        "metadata": report.metadata,
        "records": [
            {
                "system": r.system,
                "m": r.m,
                "nus": list(r.nus),
                "tau": r.tau,
                "feasible": r.feasible,
                "margin": r.margin,
                "iterations": r.iterations,
                "nodv": r.nodv,
                "wall_time": r.wall_time,
                "status": r.status,
            }
            for r in report.records
        ],
    }
    return json.dumps(payload, indent=2)


def render_table(report: RunReport, title: str = "Certification results") -> Table:
    table = Table(title=title)
    table.add_column("m", justify="right")
    table.add_column("nu", style="cyan")
    table.add_column("tau", justify="right")
    table.add_column("Feasible")
    table.add_column("Margin", justify="right")
    table.add_column("Iter", justify="right")
    table.add_column("NoDV", justify="right")
    for r in report.records:
        table.add_row(
            str(r.m),
            ",".join(str(v) for v in r.nus),
            str(r.tau),
            "[green]yes[/green]" if r.feasible else "[red]no[/red]",
            "-" if r.margin is None else f"{r.margin:.3e}",
            str(r.iterations),
            str(r.nodv),
        )
    return table


def _cell(value: Optional[int]) -> str:
    return "-" if value is None else str(value)


def hierarchy_markdown(table: HierarchyTable) -> str:
    """Triangular table: rows l, columns nu_1; cells below the diagonal stay empty"""
    nus = list(range(table.nu_max + 1))
    lines = [
        "| l \\ nu1 | " + " | ".join(str(v) for v in nus) + " |",
        "|---|" + "|".join("---" for _ in nus) + "|",
    ]
    for ell in range(1, table.l_max + 1):
        cells = []
        for nu in nus:
            rng = table.cells.get((ell, nu))
            cells.append("" if rng is None else _cell(rng.tau_max_feasible))
        lines.append(f"| {ell} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def hierarchy_csv(table: HierarchyTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["l", "nu1", "tau_max", "tau_min"])
    for (ell, nu), rng in sorted(table.cells.items()):
        writer.writerow(
            [
                ell,
                nu,
                _cell(rng.tau_max_feasible),
                _cell(rng.tau_min_feasible),
            ]
        )
    return buf.getvalue()


def hierarchy_rich(table: HierarchyTable, title: str = "Delay hierarchy") -> Table:
    out = Table(title=title)
    out.add_column("l \\ nu1", justify="right")
    for nu in range(table.nu_max + 1):
        out.add_column(str(nu), justify="right")
    for ell in range(1, table.l_max + 1):
        row = [str(ell)]
        for nu in range(table.nu_max + 1):
            rng = table.cells.get((ell, nu))
            row.append("" if rng is None else _cell(rng.tau_max_feasible))
        out.add_row(*row)
    return out
