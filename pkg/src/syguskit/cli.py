"""Command-line entry point.

Exit codes: 0 success, 1 domain failure (e.g. an invalid solution or an
unsolved benchmark), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import __version__
from .harness import HarnessError, RecordFileError, load_config, load_records, write_csv
from .parser import parse_problem
from .printer import print_problem
from .scoring import ScoringError, score
from .sexpr import ParseError
from .smt import BackendError, SmtSession
from .sorts import SortError
from .verifier import Invalid, Valid, check_solution, format_counterexample

log = logging.getLogger("syguskit")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _session(args) -> SmtSession:
    try:
        return SmtSession.create(args.smt_solver, timeout=min(args.timeout, 60.0))
    except BackendError as e:
        raise UsageError(str(e)) from None


def cmd_parse(args) -> int:
    p = parse_problem(_read(args.file))
    sys.stdout.write(print_problem(p))
    return EXIT_OK


def cmd_check(args) -> int:
    p = parse_problem(_read(args.benchmark))
    verdict = check_solution(p, _read(args.solution), _session(args))
    print(verdict.label)
    if isinstance(verdict, Invalid):
        print(format_counterexample(verdict.counterexample))
    elif getattr(verdict, "detail", ""):
        print(verdict.detail)
    elif getattr(verdict, "reason", ""):
        print(verdict.reason)
    return EXIT_OK if isinstance(verdict, Valid) else EXIT_FAIL


def cmd_solve(args) -> int:
    from .solver import Budget, Unsolved, solve

    p = parse_problem(_read(args.benchmark))
    budget = Budget(wall_seconds=args.timeout, max_term_size=args.max_size)
    try:
        cands = solve(p, budget, _session(args))
    except Unsolved as e:
        print(f"{type(e).__name__.lower()}: {e}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return EXIT_FAIL
    for c in cands:
        print(c.define_fun())
    return EXIT_OK


def cmd_run(args) -> int:
    from dataclasses import replace

    from .harness import run_suite

    cfg = load_config(args.config)
    overrides = {}
    if args.jobs is not None:
        overrides["workers"] = args.jobs
    if args.timeout_given:
        overrides["wall_limit"] = args.timeout
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.smt_solver is not None:
        overrides["smt_solver"] = args.smt_solver
    cfg = replace(cfg, **overrides)
    records = run_suite(cfg)
    write_csv(records, Path(cfg.out_dir) / "records.csv")
    for r in records:
        print(f"{r.solver_id}\t{r.benchmark_id}\t{r.status}\t{r.wall_seconds:.2f}")
    print(f"records appended to {cfg.records_path}", file=sys.stderr)
    return EXIT_OK


def cmd_score(args) -> int:
    records = load_records(args.records)
    cards, _ = score(records)
    if args.format == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["solver", "N", "F", "S", "unique", "score"])
        for c in cards:
            w.writerow([c.solver_id, c.N, c.F, c.S, c.unique, c.score])
    else:
        for c in cards:
            print(c.line())
    return EXIT_OK


def cmd_report(args) -> int:
    from .report import load_categories, report

    records = load_records(args.records)
    cats = load_categories(args.categories) if args.categories else {}
    bundle = report(records, cats, svg=args.format in (None, "svg"))
    if args.format == "text" and args.out is None:
        sys.stdout.write(bundle.table_text())
        return EXIT_OK
    if args.format == "csv" and args.out is None:
        sys.stdout.write(bundle.table_csv())
        return EXIT_OK
    formats = ("csv", "text", "svg") if args.format is None else (args.format,)
    for path in bundle.write(args.out or "report", formats):
        print(path)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--timeout", type=_positive_float, default=None,
                        help="wall-clock limit in seconds (default 3600)")
    common.add_argument("--smt-solver", default=None,
                        help="SMT backend command (default $SYGUS_SMT_SOLVER, then z3)")
    common.add_argument("--jobs", type=_positive_int, default=None)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--max-size", type=_positive_int, default=12, help="solver term size cap")
    common.add_argument("--format", choices=["csv", "text", "svg"], default=None)
    common.add_argument("--categories", default=None, help="benchmark,category sidecar file")
    common.add_argument("-v", "--verbose", action="count", default=0)

    ap = _Parser(prog="syguskit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sp = sub.add_parser("parse", parents=[common], help="print the normalized problem")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_parse)
    sp = sub.add_parser("check", parents=[common], help="grammar-check and verify a solution")
    sp.add_argument("benchmark")
    sp.add_argument("solution")
    sp.set_defaults(func=cmd_check)
    sp = sub.add_parser("solve", parents=[common], help="run the reference solver")
    sp.add_argument("benchmark")
    sp.set_defaults(func=cmd_solve)
    sp = sub.add_parser("run", parents=[common], help="run a benchmark suite from a config file")
    sp.add_argument("config")
    sp.set_defaults(func=cmd_run)
    sp = sub.add_parser("score", parents=[common], help="print score cards for a record file")
    sp.add_argument("records")
    sp.set_defaults(func=cmd_score)
    sp = sub.add_parser("report", parents=[common], help="category table, detail CSV and SVG")
    sp.add_argument("records")
    sp.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    args.timeout_given = args.timeout is not None
    if args.timeout is None:
        args.timeout = 3600.0
    try:
        return args.func(args)
    except UsageError as e:
        print(f"syguskit: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, SortError) as e:
        print(f"syguskit: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (HarnessError, RecordFileError, ScoringError, BackendError) as e:
        print(f"syguskit: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
