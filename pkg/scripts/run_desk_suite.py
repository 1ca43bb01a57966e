"""Run the reference solver over the desk suite and print a per-benchmark table.

    python scripts/run_desk_suite.py [--timeout 60] [--max-size 12] [--out runs/desk-direct]

Unlike ``syguskit run`` this calls the solver in-process, so it also reports
CEGIS round counts. Records are written for ``syguskit score``/``report``.
"""

from __future__ import annotations

import argparse
import logging
import time
from pathlib import Path

from syguskit.harness import RunRecord, write_records
from syguskit.parser import parse_problem
from syguskit.printer import print_term
from syguskit.smt import SmtSession
from syguskit.solver import Budget, SolveStats, Unsolved, solve
from syguskit.terms import term_size
from syguskit.verifier import Valid, check_solution

DESK = Path(__file__).resolve().parent.parent / "benchmarks" / "desk"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--timeout", type=float, default=60.0)
    ap.add_argument("--max-size", type=int, default=12)
    ap.add_argument("--out", default="runs/desk-direct")
    ap.add_argument("--smt-solver", default=None)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)

    session = SmtSession.create(args.smt_solver, timeout=args.timeout)
    records = []
    print(f"{'benchmark':24} {'status':10} {'rounds':>6} {'secs':>7} {'size':>5}  solution")
    for path in sorted(DESK.glob("*.sl")):
        p = parse_problem(path.read_text())
        stats = SolveStats()
        start = time.monotonic()
        try:
            [c] = solve(p, Budget(wall_seconds=args.timeout, max_term_size=args.max_size), session, stats)
        except Unsolved as e:
            wall = time.monotonic() - start
            status = "Timeout" if type(e).__name__ == "TimedOut" else "Unknown"
            records.append(RunRecord("reference", path.name, status, wall, detail=str(e)))
            print(f"{path.stem:24} {status:10} {stats.rounds:>6} {wall:>7.2f} {'-':>5}  {e}")
            continue
        wall = time.monotonic() - start
        text = c.define_fun()
        ok = check_solution(p, text, session) == Valid()
        status = "Solved" if ok else "SemanticReject"
        size = term_size(c.body)
        records.append(RunRecord("reference", path.name, status, wall, text, size))
        print(f"{path.stem:24} {status:10} {stats.rounds:>6} {wall:>7.2f} {size:>5}  {print_term(c.body)}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_records(records, out / "records.jsonl")
    print(f"records written to {out / 'records.jsonl'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
