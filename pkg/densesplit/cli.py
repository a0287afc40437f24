"""Command-line front end.

Exit codes: 0 success, 1 certificate or assertion failure, 2 parse, config or
precondition error, 3 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import pandas as pd

from .errors import (
    BudgetExceeded,
    GraphFormatError,
    InternalProofGap,
    InvalidGraphError,
    LedgerMismatch,
    PreconditionDensity,
)
from .fractional import SplitParams, parse_rational
from .graph_core import Graph, parse_family, read_graph
from .lab import calcs, extremal, probes
from . import ledger, minor_oracle, splitter
from .settings import BUDGETS, LOGGING

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

SUBCOMMANDS = ("split", "minor", "circumference", "ex", "probe", "check")
RANDOMIZED = {("probe", "partition"), ("check", "erdos-gallai"), ("check", "dirac-justesen")}


@dataclass
class CommandConfig:
    subcommand: str
    action: str | None = None
    graph: Path | None = None
    family: str | None = None
    pattern: Path | None = None
    h: list[str] = field(default_factory=list)
    s: Fraction | None = None
    t: Fraction | None = None
    n: int | None = None
    n_max: int | None = None
    trials: int | None = None
    seed: int | None = None
    budget: int | None = None
    jobs: int = 1
    output: Path | None = None
    trace: Path | None = None
    ledger: Path | None = None
    fallback_exhaustive: bool = False
    disjoint: bool = False
    verbose: bool = False

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise GraphFormatError(f"unknown subcommand {self.subcommand!r}")
        if self.budget is not None and self.budget <= 0:
            raise GraphFormatError(f"budgets must be positive, got {self.budget}")
        if self.jobs < 1:
            raise GraphFormatError(f"--jobs must be at least 1, got {self.jobs}")
        if (self.subcommand, self.action) in RANDOMIZED and self.seed is None:
            raise GraphFormatError(f"'{self.subcommand} {self.action}' is randomized and needs an explicit --seed")


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except GraphFormatError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="log every step")
    common.add_argument("--budget", type=int, help="override the search budget (vertices)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sharded enumeration")
    common.add_argument("--output", type=Path, help="write the JSON result here")

    parser = argparse.ArgumentParser(prog="densesplit", description="Dense graph splitting and minor experiments")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    split = sub.add_parser("split", parents=[common], help="split a dense graph into two dense pieces")
    _add_graph_source(split)
    split.add_argument("--s", type=_rational, required=True)
    split.add_argument("--t", type=_rational, required=True)
    split.add_argument("--trace", type=Path, help="write the trace JSON here")
    split.add_argument("--fallback-exhaustive", action="store_true")

    minor = sub.add_parser("minor", parents=[common], help="test for an H minor")
    _add_graph_source(minor)
    pattern = minor.add_mutually_exclusive_group(required=True)
    pattern.add_argument("--pattern", type=Path, help="graph file for H")
    pattern.add_argument("--h", action="append", help="family expression for H")

    cycles = sub.add_parser("circumference", parents=[common], help="longest cycle length")
    _add_graph_source(cycles)
    cycles.add_argument("--disjoint", action="store_true", help="also report the most vertex-disjoint cycles")

    ex = sub.add_parser("ex", parents=[common], help="exact ex_m(n, H) with ledger check")
    ex.add_argument("--n", type=int, required=True)
    ex.add_argument("--h", action="append", required=True)
    ex.add_argument("--ledger", type=Path)

    probe = sub.add_parser("probe", parents=[common], help="conjecture probes")
    probe.add_argument("action", choices=("partition", "cycles"))
    probe.add_argument("--n-max", type=int, required=True)
    probe.add_argument("--s", type=_rational)
    probe.add_argument("--t", type=_rational)
    probe.add_argument("--h", action="append")
    probe.add_argument("--trials", type=int)
    probe.add_argument("--seed", type=int)

    check = sub.add_parser("check", parents=[common], help="theorem desk checks")
    check.add_argument("action", choices=("erdos-gallai", "dirac-justesen", "union-bound", "lower-bound"))
    check.add_argument("--n-max", type=int, required=True)
    check.add_argument("--h", action="append")
    check.add_argument("--trials", type=int)
    check.add_argument("--seed", type=int)
    return parser


def _add_graph_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("graph", nargs="?", type=Path, help="graph text file")
    source.add_argument("--family", help="family expression such as K7 or 2C3+C4")


def parse_config(argv: Sequence[str] | None = None) -> CommandConfig:
    args = vars(build_parser().parse_args(argv))
    known = CommandConfig.__dataclass_fields__
    values = {key: value for key, value in args.items() if key in known and value is not None}
    return CommandConfig(**values)


# ----------------------------------------------------------------- dispatch

def _load_graph(config: CommandConfig) -> Graph:
    if config.family:
        return parse_family(config.family).build()
    return read_graph(config.graph)


def _emit(config: CommandConfig, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if config.output:
        config.output.write_text(text + "\n")


def _emit_report(config: CommandConfig, report: pd.DataFrame, title: str) -> int:
    report = calcs.load_report_calcs(report)
    print(report.to_string(index=False) if not report.empty else f"{title}: nothing to check")
    key = "n" if "n" in report.columns else None
    if key:
        print(calcs.tabulate_by(report, key).to_string(index=False))
    payload = calcs.report_to_json(report, title)
    if config.output:
        config.output.write_text(json.dumps(payload, indent=2) + "\n")
    summary = payload["summary"]
    log.info(f"{title}: {summary['passed']} passed, {summary['failed']} failed")
    return EXIT_OK if calcs.report_ok(report) else EXIT_FAILED


def _pattern_expr(config: CommandConfig) -> str:
    if not config.h:
        raise GraphFormatError(f"'{config.subcommand}' needs --h")
    return "+".join(config.h)


def run_split(config: CommandConfig) -> int:
    g = _load_graph(config)
    params = SplitParams(config.s, config.t)
    try:
        result = splitter.split(
            g, params, fallback_exhaustive=config.fallback_exhaustive, budget=config.budget
        )
    except InternalProofGap as gap:
        if config.trace:
            steps = [step.to_json() for step in gap.trace]
            config.trace.write_text(json.dumps({"params": params.to_json(), "steps": steps, "error": str(gap)}, indent=2))
        raise
    if config.trace:
        config.trace.write_text(json.dumps(splitter.trace_to_json(result, params), indent=2) + "\n")
    _emit(config, result.to_json())
    return EXIT_OK if result.certificate_ok else EXIT_FAILED


def run_minor(config: CommandConfig) -> int:
    g = _load_graph(config)
    h = read_graph(config.pattern) if config.pattern else parse_family(_pattern_expr(config)).build()
    embedding = minor_oracle.has_minor(g, h, budget=config.budget)
    if embedding is None:
        print("none")
        if config.output:
            config.output.write_text("null\n")
        return EXIT_OK
    _emit(config, embedding.to_json())
    return EXIT_OK


def run_circumference(config: CommandConfig) -> int:
    g = _load_graph(config)
    payload = {"circumference": minor_oracle.circumference(g, budget=config.budget)}
    if config.disjoint:
        payload["disjoint_cycles"] = minor_oracle.max_disjoint_cycles(g, budget=config.budget)
    _emit(config, payload)
    return EXIT_OK


def run_ex(config: CommandConfig) -> int:
    record = extremal.ex_minor(config.n, _pattern_expr(config), jobs=config.jobs, budget=config.budget)
    problems = extremal.validate_record(record)
    for problem in problems:
        log.error(problem)
    if problems:
        log.error(f"ex(n={record.n}, {record.h_code}) failed validation; ledger left untouched")
        _emit(config, record.to_json())
        return EXIT_FAILED
    ledger.verify_record(record, config.ledger)
    _emit(config, record.to_json())
    return EXIT_OK


def run_probe(config: CommandConfig) -> int:
    if config.action == "partition":
        if config.s is None or config.t is None:
            raise GraphFormatError("'probe partition' needs --s and --t")
        report = probes.probe_partition_conjecture(
            config.n_max, config.s, config.t, config.trials, config.seed, budget=config.budget
        )
        return _emit_report(config, report, "partition conjecture")
    report = probes.probe_cycle_conjecture(
        _pattern_expr(config), config.n_max, jobs=config.jobs, budget=config.budget
    )
    return _emit_report(config, report, "cycle conjecture")


def run_check(config: CommandConfig) -> int:
    if config.action == "erdos-gallai":
        report = probes.check_erdos_gallai(config.n_max, config.trials, config.seed, budget=config.budget)
    elif config.action == "dirac-justesen":
        report = probes.check_dirac_justesen(config.n_max, config.trials, config.seed, budget=config.budget)
    elif config.action == "union-bound":
        parts = [leaf for expr in (config.h or []) for leaf in parse_family(expr).flat_parts()]
        if not parts:
            raise GraphFormatError("'check union-bound' needs --h")
        report = extremal.verify_union_bound(parts, config.n_max, jobs=config.jobs, budget=config.budget)
    else:
        if not config.h:
            raise GraphFormatError("'check lower-bound' needs --h")
        report = extremal.check_lower_bound(config.h, config.n_max, budget=config.budget)
    return _emit_report(config, report, config.action)


HANDLERS = {
    "split": run_split,
    "minor": run_minor,
    "circumference": run_circumference,
    "ex": run_ex,
    "probe": run_probe,
    "check": run_check,
}


def run(config: CommandConfig) -> int:
    """Dispatch and map every outcome category to exactly one exit code."""
    try:
        return HANDLERS[config.subcommand](config)
    except BudgetExceeded as err:
        log.error(f"Budget exceeded: {err}")
        return EXIT_BUDGET
    except (InternalProofGap, LedgerMismatch) as err:
        log.error(f"{type(err).__name__}: {err}")
        return EXIT_FAILED
    except (GraphFormatError, InvalidGraphError, PreconditionDensity, OSError) as err:
        log.error(f"{type(err).__name__}: {err}")
        return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    try:
        config = parse_config(argv)
    except GraphFormatError as err:
        print(f"densesplit: {err}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as err:
        # argparse exits with 2 on bad usage and 0 on --help
        return int(err.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if config.verbose else LOGGING['level'],
        format=LOGGING['format'],
        datefmt=LOGGING['datefmt'],
    )
    if config.budget is not None:
        log.debug(f"budget override {config.budget} (defaults: {BUDGETS})")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
