#!/usr/bin/env python3
"""cagen command-line entry point.

Subcommands:
    generate  build a covering array for a CA/MCA notation
    verify    check a suite CSV against a notation
    bench     run the builtin benchmark set and write CSV reports
    stats     rank-sum + Holm comparison of per-run results or reference groups
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from . import __version__
from .config import get_settings
from .core.bench import (
    builtin_suites,
    filter_suites,
    reference_groups,
    run_benchmark,
    summary_frame,
    write_benchmark_outputs,
)
from .core.engine import EngineConfig, Strategy, generate_best_of
from .core.notation import parse_ca_notation, render_ca_notation
from .core.operators import OperatorKind
from .core.stats import DEFAULT_ALPHAS, compare_reference_table, compare_strategies
from .core.suite_io import read_runs_csv, read_suite_csv, write_frame_csv, write_suite_csv, write_trace_csv
from .core.verify import size_lower_bound, verify_suite
from .utils import ConfigurationError, VerificationError, configure_logging, error_handler, get_logger

logger = get_logger(__name__)
console = Console()


def _draw_seed() -> int:
    return int(np.random.SeedSequence().entropy) & (2**63 - 1)


def _cell(value, fmt: str) -> str:
    return "" if pd.isna(value) else fmt.format(value)


def _strategies(text: str) -> List[Strategy]:
    try:
        return [Strategy(part.strip().lower()) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigurationError(f"unknown strategy in {text!r}", config_key="strategies", value=text) from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cagen",
        description="Covering array generation with SCA and Q-learning SCA",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", type=str.upper, default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    parser.add_argument("--log-file", type=Path, default=None, help="also log to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a covering array")
    gen.add_argument("notation", help='e.g. "CA(2,3^4)" or "MCA(2,5^1 3^8 2^2)"')
    gen.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.QLSCA.value)
    gen.add_argument("--seed", type=int, default=None, help="drawn from entropy and printed when absent")
    gen.add_argument("--pop", type=int, default=None, help="population size")
    gen.add_argument("--iters", type=int, default=None, help="iterations per row search")
    gen.add_argument("--magnitude", type=float, default=None, help="radius constant M")
    gen.add_argument("--gamma", type=float, default=None, help="Q-learning discount")
    gen.add_argument("--runs", type=int, default=1, help="keep the best of N seeded runs")
    gen.add_argument("--out", type=Path, default=None, help="suite CSV path")
    gen.add_argument("--trace", type=Path, default=None, help="convergence trace CSV path")
    gen.add_argument("--record-qtable", action="store_true", help="add Q-table columns to the trace")

    ver = sub.add_parser("verify", help="verify a suite CSV")
    ver.add_argument("suite", type=Path)
    ver.add_argument("notation")
    ver.add_argument("--show-missing", type=int, default=10, help="list at most N missing tuples")

    bench = sub.add_parser("bench", help="run the builtin benchmark set")
    bench.add_argument("--suite-filter", default=None, help="shell-style pattern on suite name or slug")
    bench.add_argument("--group", choices=reference_groups(), default=None)
    bench.add_argument("--reps", type=int, default=None)
    bench.add_argument("--parallel", type=int, default=None, help="defaults to CAGEN_PARALLEL")
    bench.add_argument("--base-seed", type=int, default=None)
    bench.add_argument("--out-dir", type=Path, default=None)
    bench.add_argument("--strategies", default="sca,qlsca")
    bench.add_argument("--pop", type=int, default=None)
    bench.add_argument("--iters", type=int, default=None)
    bench.add_argument("--trace", action="store_true", help="write a convergence CSV per run")
    bench.add_argument("--no-timing", action="store_true",
                       help="write wall_millis as 0; run CSVs are then byte-identical "
                            "across repeated invocations and --parallel levels")

    stats = sub.add_parser("stats", help="Wilcoxon rank-sum with Bonferroni-Holm")
    stats.add_argument("runs", nargs="?", type=Path, default=None, help="per-run CSV")
    stats.add_argument("--control", default="qlsca")
    stats.add_argument("--alpha", type=float, action="append", default=None,
                       help=f"repeatable; default {', '.join(map(str, DEFAULT_ALPHAS))}")
    stats.add_argument("--reference", choices=reference_groups(), default=None,
                       help="compare published best sizes of a reference group instead")
    stats.add_argument("--out", type=Path, default=None, help="write the report as CSV")
    return parser


# ----------------------------------------------------------------------
# subcommands


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = parse_ca_notation(args.notation)
    seed = args.seed if args.seed is not None else _draw_seed()
    if args.seed is None:
        console.print(f"seed: {seed}")

    ecfg = EngineConfig.from_settings(
        seed,
        population_size=args.pop,
        max_iterations=args.iters,
        magnitude=args.magnitude,
        gamma=args.gamma,
        record_qtable=True if args.record_qtable else None,
    )
    report, sizes = generate_best_of(cfg, ecfg, Strategy(args.strategy), args.runs)
    verdict = verify_suite(report.suite)

    table = Table(title=render_ca_notation(cfg), show_header=False)
    table.add_row("strategy", report.strategy.value)
    table.add_row("seed", str(report.seed))
    table.add_row("size", str(report.size))
    table.add_row("lower bound", str(size_lower_bound(cfg)))
    if args.runs > 1:
        table.add_row("sizes", " ".join(map(str, sizes)))
    table.add_row("rounds / fallbacks", f"{report.rounds} / {report.fallback_count}")
    table.add_row("operators", "  ".join(
        f"{kind.column} {report.operator_fractions[kind]:.1%}" for kind in OperatorKind))
    table.add_row("wall", f"{report.wall_millis} ms")
    table.add_row("verification", "complete" if verdict.complete else f"{verdict.missing_count} missing")
    console.print(table)

    if args.out:
        write_suite_csv(report.suite, args.out)
        console.print(f"suite written to {args.out}")
    if args.trace:
        write_trace_csv(report, args.trace)
        console.print(f"trace written to {args.trace}")
    if not verdict.complete:
        raise VerificationError("generated suite is not a covering array",
                                missing=verdict.missing_count, configuration=render_ca_notation(cfg))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = parse_ca_notation(args.notation)
    suite = read_suite_csv(args.suite, cfg)
    report = verify_suite(suite)

    status = "[green]complete[/green]" if report.complete else "[red]incomplete[/red]"
    console.print(f"{render_ca_notation(cfg)}: {suite.size} rows, {status}, "
                  f"{report.missing_count} missing, {len(report.structural)} structural violations")
    for violation in report.structural:
        console.print(f"  row {violation.row_index}: {violation.reason}")
    for tup in report.missing[:args.show_missing]:
        console.print(f"  missing {escape(str(tup))}")
    if report.missing_count > args.show_missing:
        console.print(f"  ... {report.missing_count - args.show_missing} more")
    if report.structural:
        raise VerificationError(f"{len(report.structural)} rows violate the configuration",
                                missing=report.missing_count, configuration=render_ca_notation(cfg))
    if not report.complete:
        raise VerificationError("suite does not cover every interaction tuple",
                                missing=report.missing_count, configuration=render_ca_notation(cfg))
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    settings = get_settings()
    parallel = args.parallel if args.parallel is not None else settings.parallel
    out_dir = args.out_dir or settings.output_dir
    strategies = _strategies(args.strategies)

    specs = filter_suites(builtin_suites(args.reps, args.base_seed), args.suite_filter)
    if args.group:
        specs = [s for s in specs if s.group == args.group]
    if not specs:
        raise ConfigurationError("no builtin suite matches the filter",
                                 config_key="suite_filter", value=args.suite_filter)

    engine = EngineConfig.from_settings(0, population_size=args.pop, max_iterations=args.iters)
    results = []
    for spec in specs:
        result = run_benchmark(replace(spec, strategies=tuple(strategies)), parallel, engine)
        path = write_benchmark_outputs(result, out_dir, timing=not args.no_timing, trace=args.trace)
        console.print(f"{spec.group}/{spec.name}: " + ", ".join(
            f"{s.value} best {r.best_size} mean {r.mean_size:.2f}" for s, r in result.summaries.items())
            + f"  -> {path}")
        results.append(result)

    frame = summary_frame(results)
    if args.no_timing and "mean_wall_millis" in frame.columns:
        frame["mean_wall_millis"] = 0.0
    summary_path = write_frame_csv(frame, Path(out_dir) / "summary.csv")

    table = Table(title=f"benchmark summary ({len(specs)} suites)")
    for column in ("benchmark", "strategy", "best", "mean", "std", "reference_best", "reference_mean"):
        table.add_column(column)
    for row in frame.itertuples(index=False):
        table.add_row(row.benchmark, row.strategy, str(row.best), f"{row.mean:.2f}", f"{row.std:.2f}",
                      _cell(row.reference_best, "{}"), _cell(row.reference_mean, "{:.2f}"))
    console.print(table)
    console.print(f"summary written to {summary_path}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    alphas = tuple(args.alpha) if args.alpha else DEFAULT_ALPHAS
    if args.reference:
        frame = compare_reference_table(args.reference, alphas)
        title = f"reference group {args.reference}: QLSCA as control"
    elif args.runs is not None:
        frame = compare_strategies(read_runs_csv(args.runs), args.control, alphas)
        title = f"{args.runs}: {args.control} as control"
    else:
        raise ConfigurationError("stats needs a per-run CSV or --reference GROUP", config_key="runs")

    table = Table(title=title)
    for column in ("comparison", "statistic", "p_value", "alpha", "holm_threshold", "reject"):
        table.add_column(column)
    for row in frame.itertuples(index=False):
        table.add_row(row.comparison, f"{row.statistic:.4f}", f"{row.p_value:.6f}",
                      f"{row.alpha:g}", f"{row.holm_threshold:.4f}", "yes" if row.reject else "no")
    console.print(table)
    if args.out:
        write_frame_csv(frame, args.out)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "bench": cmd_bench,
    "stats": cmd_stats,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code.

    0 success, 1 verification failure, 2 usage or parse error,
    3 internal invariant violation.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0

    try:
        configure_logging(log_level=args.log_level, log_file=args.log_file)
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        return 130
    except Exception as e:
        return error_handler.handle_error(e, args.command)


if __name__ == "__main__":
    sys.exit(main())
