#!/usr/bin/env python3
"""
delaylmi CLI

Exit codes: 0 feasible / success, 1 infeasible, 2 error, 3 hierarchy violation.
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from . import __version__
from .core.lmi import assemble
from .core.property_suite import run_property_suite
from .core.sdp import solve_feasibility
from .core.stability import (
    ascending_scan,
    hierarchy_table,
    lifting_scan,
    max_delay,
    nodv,
    nodv_lifting,
)
from .errors import ArgumentError, DelayLmiError
from .models.core import LmiSpec, RunRecord, RunReport
from .models.schema import SolverOptions, SystemFile
from .solver_config import (
    AnalysisConfig,
    ConfigurationLoader,
    get_config_paths,
    load_configuration,
)
from .systems import load_system
from .utils.reports import (
    hierarchy_csv,
    hierarchy_markdown,
    records_from_range,
    render_table,
    to_csv,
    to_json,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_ERROR = 2
EXIT_HIERARCHY = 3

logger = logging.getLogger(__name__)


def _configure_logging(level: str) -> None:
    root = logging.getLogger("delaylmi")
    root.handlers.clear()
    handler = RichHandler(console=Console(stderr=True), show_path=False)
    root.addHandler(handler)
    root.setLevel(level.upper())
    root.propagate = False


def parse_scan(text: str) -> Tuple[int, int]:
    """'LO:HI' -> (LO, HI), inclusive"""
    try:
        lo, hi = (int(part) for part in text.split(":"))
    except ValueError as e:
        raise ArgumentError(f"scan range must look like LO:HI, got {text!r}") from e
    if lo < 0 or hi < lo:
        raise ArgumentError(f"empty or negative scan range {text!r}")
    return lo, hi


def parse_spec(m: int, nu1: int, nus: Optional[str]) -> LmiSpec:
    if nus:
        try:
            values = tuple(int(v) for v in nus.split(","))
        except ValueError as e:
            raise ArgumentError(
                f"--nus must be comma-separated integers, got {nus!r}", field="nus", value=nus
            ) from e
        if values[0] != nu1:
            raise ArgumentError(f"--nus must start with nu1={nu1}, got {nus}")
        return LmiSpec(m, values)
    return LmiSpec.default(m, nu1)


def _resolve_config(args: Any) -> AnalysisConfig:
    config = load_configuration()
    if getattr(args, "tol", None) is not None:
        config.feas_tol = args.tol
    if getattr(args, "jobs", None) is not None:
        config.jobs = args.jobs
    if getattr(args, "early_decision", False):
        config.early_decision = True
    return config


def _metadata(system: SystemFile, opts: SolverOptions) -> Dict[str, Any]:
    return {
        "system": system.name,
        "n_x": system.n_x,
        "solver_options": opts.model_dump(),
        "delaylmi": __version__,
        "numpy": np.__version__,
    }


def _default_scan(system: SystemFile, lowest: int) -> Tuple[int, int]:
    if system.scan is None:
        raise ArgumentError(f"system {system.name} has no default scan; pass --scan")
    return max(system.scan[0], lowest), system.scan[1]


def cmd_certify(args: Any) -> int:
    """Decide the LMI for one delay"""
    console = Console()
    system = load_system(args.system)
    config = _resolve_config(args)
    opts = config.solver_options()
    spec = parse_spec(args.m, args.nu1, args.nus)
    model = system.to_model(args.tau)

    started = time.perf_counter()
    result = solve_feasibility(assemble(model, spec), opts)
    elapsed = time.perf_counter() - started

    record = RunRecord(
        system=system.name,
        m=spec.m,
        nus=spec.nus,
        tau=model.tau,
        feasible=result.feasible,
        margin=result.margin,
        iterations=result.iterations,
        nodv=nodv(system.n_x, spec.nu1, spec.m),
        wall_time=elapsed,
        status=result.status.value,
    )
    report = RunReport([record], _metadata(system, opts))
    if args.json:
        print(to_json(report))
    else:
        verdict = "[green]feasible[/green]" if result.feasible else "[red]infeasible[/red]"
        label = escape(spec.label())
        console.print(f"{escape(system.name)} tau={model.tau} {label}: {verdict}")
        console.print(f"margin {result.margin:.6e} ({result.status.value})")
        if result.borderline:
            console.print("[yellow]margin within tolerance of zero[/yellow]")
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def cmd_max_delay(args: Any) -> int:
    """Scan delays and report the feasible range"""
    console = Console()
    system = load_system(args.system)
    config = _resolve_config(args)
    opts = config.solver_options()
    spec = parse_spec(args.m, args.nu1, args.nus)
    lo, hi = parse_scan(args.scan) if args.scan else _default_scan(system, 1)

    rng = max_delay(system.to_model(), spec, ascending_scan(lo, hi), opts, config.jobs)
    records = records_from_range(system.name, rng, system.n_x)
    report = RunReport(records, _metadata(system, opts))

    if args.csv:
        Path(args.csv).write_text(to_csv(report), encoding="utf-8")
        logger.info(f"Wrote {len(records)} records to {args.csv}")
    if args.json:
        print(to_json(report))
        return EXIT_OK if rng.tau_max_feasible is not None else EXIT_INFEASIBLE

    count = nodv(system.n_x, spec.nu1, spec.m)
    positive = rng.tau_max_positive_margin
    if positive is not None and positive != rng.tau_max_feasible:
        console.print(
            f"[yellow]margin stays positive up to tau={positive} "
            f"but is not certified there (feas_tol={opts.feas_tol:g})[/yellow]"
        )
    if rng.tau_max_feasible is None:
        console.print(f"no feasible delay in {lo}:{hi} for {escape(spec.label())}")
        return EXIT_INFEASIBLE
    console.print(f"tau_M = {rng.tau_max_feasible}")
    if rng.has_left_edge:
        console.print(f"tau_min = {rng.tau_min_feasible}")
    if not rng.is_interval:
        console.print("[yellow]feasible delays do not form an interval[/yellow]")
    console.print(f"NoDV = {count}")
    if args.verbose:
        console.print(render_table(report, title=f"{system.name} {spec.label()}"))
    return EXIT_OK


def cmd_hierarchy(args: Any) -> int:
    """Fill the (l, nu_1) table of maximal delays and check its ordering"""
    console = Console()
    system = load_system(args.system)
    config = _resolve_config(args)
    opts = config.solver_options()
    lo, hi = parse_scan(args.scan) if args.scan else _default_scan(system, 1)

    table = hierarchy_table(
        system.to_model(), args.lmax, args.numax, ascending_scan(lo, hi), opts, config.jobs
    )
    fmt = args.format or config.output_format
    if args.json:
        records: List[RunRecord] = []
        for rng in table.cells.values():
            records.extend(records_from_range(system.name, rng, system.n_x))
        print(to_json(RunReport(records, _metadata(system, opts))))
    elif fmt == "csv":
        sys.stdout.write(hierarchy_csv(table))
    else:
        sys.stdout.write(hierarchy_markdown(table))

    if table.violations:
        for v in table.violations:
            console.print(
                f"[red]hierarchy violation[/red] moving {v.direction}: "
                f"{v.source} -> {v.target} ({v.source_tau} > {v.target_tau})"
            )
        return EXIT_HIERARCHY
    return EXIT_OK


def cmd_lift(args: Any) -> int:
    """Exact stable delay set via the lifted system"""
    console = Console()
    system = load_system(args.system)
    config = _resolve_config(args)
    lo, hi = parse_scan(args.scan) if args.scan else _default_scan(system, 0)
    A, A_d = system.matrices()

    scan = lifting_scan(A, A_d, ascending_scan(lo, hi), config.jobs)
    console.print(f"stable delays: {escape(scan.render())}")
    if not scan.stable:
        return EXIT_INFEASIBLE
    boundary = scan.stable[-1]
    console.print(f"NoDV at tau={boundary}: {nodv_lifting(system.n_x, boundary)}")
    return EXIT_OK


def cmd_verify_ineq(args: Any) -> int:
    """Randomized check of the summation inequalities"""
    console = Console()
    report = run_property_suite(args.trials, args.seed, args.nmax, args.mmax)

    table = Table(title=f"Inequality checks ({report.trials} trials, seed {report.seed})")
    table.add_column("Check", style="cyan")
    table.add_column("Passed", justify="right")
    table.add_column("Failed", justify="right")
    for name, tally in sorted(report.checks.items()):
        table.add_row(name, str(tally.passed), str(tally.failed))
    console.print(table)

    for name, tally in report.checks.items():
        for detail in tally.failures:
            console.print(f"[red]{escape(name)}[/red] {escape(detail)}")
    console.print(f"passed: {sum(t.passed for t in report.checks.values())}")
    console.print(f"failed: {sum(t.failed for t in report.checks.values())}")
    return EXIT_OK if report.all_passed else EXIT_INFEASIBLE


def cmd_config(args: Any) -> int:
    """Show or initialize configuration"""
    console = Console()
    if args.action == "init":
        loader = ConfigurationLoader()
        target = loader.project_root / ".delaylmi.yaml"
        if target.exists() and not args.force:
            console.print(f"{target} already exists; use --force to overwrite")
            return EXIT_ERROR
        if not loader.create_default_project_config():
            return EXIT_ERROR
        console.print(f"Project configuration created: {target}")
        return EXIT_OK

    loader = ConfigurationLoader()
    config = loader.load_config()
    paths = get_config_paths(loader.project_root)

    sources = Table(title="Configuration Sources")
    sources.add_column("Source", style="cyan")
    sources.add_column("Location")
    for source, location in loader.sources:
        sources.add_row(source, escape(location))
    sources.add_row("user file", escape(str(paths["user"])))
    sources.add_row("project file", escape(str(paths["project"])))
    console.print(sources)

    settings = Table(title="Active Settings")
    settings.add_column("Setting", style="cyan")
    settings.add_column("Value", style="green")
    for key, value in config.to_dict().items():
        settings.add_row(key, str(value))
    console.print(settings)
    return EXIT_OK


def _add_system_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--system", required=True, help="System JSON file or bundled name (ex1, ex2, ex3)"
    )


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=int, required=True, help="Summation multiplicity")
    p.add_argument("--nu1", type=int, required=True, help="Highest polynomial degree")
    p.add_argument("--nus", help="Explicit degrees nu1,nu2,... (strictly decreasing)")


def _add_solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, help="Margin decision threshold")
    p.add_argument(
        "--early-decision",
        action="store_true",
        help="Stop each solve once the margin sign is settled",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delaylmi",
        description="Stability LMIs for discrete-time delay systems",
    )
    parser.add_argument("--version", action="version", version=f"delaylmi {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    certify_parser = subparsers.add_parser("certify", help="Decide the LMI at one delay")
    _add_system_args(certify_parser)
    certify_parser.add_argument("--tau", type=int, help="Delay (defaults to the file's)")
    _add_spec_args(certify_parser)
    _add_solver_args(certify_parser)
    certify_parser.add_argument("--json", action="store_true", help="Emit a JSON report")

    max_parser = subparsers.add_parser("max-delay", help="Scan delays for one LMI")
    _add_system_args(max_parser)
    _add_spec_args(max_parser)
    max_parser.add_argument("--scan", help="Inclusive delay range LO:HI")
    max_parser.add_argument("--csv", help="Write per-delay records to this CSV file")
    max_parser.add_argument("--json", action="store_true", help="Emit a JSON report")
    max_parser.add_argument("--jobs", type=int, help="Parallel workers")
    _add_solver_args(max_parser)

    hier_parser = subparsers.add_parser("hierarchy", help="Table of maximal delays")
    _add_system_args(hier_parser)
    hier_parser.add_argument("--lmax", type=int, required=True, help="Largest multiplicity")
    hier_parser.add_argument("--numax", type=int, required=True, help="Largest nu1")
    hier_parser.add_argument("--scan", help="Inclusive delay range LO:HI")
    hier_parser.add_argument("--format", choices=["md", "csv"], help="Table format")
    hier_parser.add_argument("--json", action="store_true", help="Emit a JSON report")
    hier_parser.add_argument("--jobs", type=int, help="Parallel workers")
    _add_solver_args(hier_parser)

    lift_parser = subparsers.add_parser("lift", help="Exact stable delays by lifting")
    _add_system_args(lift_parser)
    lift_parser.add_argument("--scan", help="Inclusive delay range LO:HI")
    lift_parser.add_argument("--jobs", type=int, help="Parallel workers")

    ineq_parser = subparsers.add_parser(
        "verify-ineq", help="Randomized check of the summation inequalities"
    )
    ineq_parser.add_argument("--trials", type=int, default=1000)
    ineq_parser.add_argument("--seed", type=int, default=0)
    ineq_parser.add_argument("--nmax", type=int, default=12)
    ineq_parser.add_argument("--mmax", type=int, default=3)

    config_parser = subparsers.add_parser("config", help="Manage delaylmi configuration")
    config_subparsers = config_parser.add_subparsers(dest="action", help="Config actions")
    config_subparsers.add_parser("show", help="Show current configuration")
    init_parser = config_subparsers.add_parser(
        "init", help="Write a default .delaylmi.yaml"
    )
    init_parser.add_argument("--force", action="store_true", help="Overwrite existing file")

    return parser


COMMANDS = {
    "certify": cmd_certify,
    "max-delay": cmd_max_delay,
    "hierarchy": cmd_hierarchy,
    "lift": cmd_lift,
    "verify-ineq": cmd_verify_ineq,
    "config": cmd_config,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI with subcommands"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_ERROR
    if args.command == "config" and not args.action:
        args.action = "show"

    try:
        level = "DEBUG" if args.verbose else load_configuration().log_level
        _configure_logging(level)
        return COMMANDS[args.command](args)
    except (DelayLmiError, ValidationError, OSError) as e:
        Console(stderr=True).print(f"[red]error:[/red] {escape(str(e))}")
        return EXIT_ERROR
    except KeyboardInterrupt:
        Console(stderr=True).print("interrupted")
        return EXIT_ERROR


def run() -> None:
    """Console-script entry point"""
    sys.exit(main())


if __name__ == "__main__":
    run()
