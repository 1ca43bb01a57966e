"""Run solvers over benchmark suites under a wall-clock limit and record results.

Each (solver, benchmark) pair runs as its own process group. Whatever the
solver prints is routed through check_solution after the process exits, so
checking time is never charged to the solver.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import glob
import json
import logging
import os
import shlex
import signal
import subprocess
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .parser import parse_candidate, parse_problem
from .sexpr import ParseError
from .smt import BackendError, SmtSession
from .sorts import SortError
from .terms import Problem, term_size
from .verifier import IllFormed, Invalid, SyntacticReject, Unknown, Valid, check_solution

log = logging.getLogger(__name__)

GRACE_SECONDS = 2.0
BUILTIN = "builtin"
STATUSES = ("Solved", "SyntacticReject", "SemanticReject", "IllFormed", "Timeout", "Crash", "Unknown")


class HarnessError(Exception):
    pass


class RecordFileError(ValueError):
    pass


@dataclass(frozen=True)
class SolverSpec:
    """``invocation`` is a command line containing ``{benchmark}`` (and
    optionally ``{timeout}``), or the string ``builtin`` for the reference solver."""

    id: str
    invocation: str = BUILTIN

    def command(self, benchmark: str, timeout: float, smt_solver: str | None = None) -> list[str]:
        if self.invocation == BUILTIN:
            cmd = [sys.executable, "-m", "syguskit", "solve", benchmark, "--timeout", f"{timeout:g}"]
            if smt_solver:
                cmd += ["--smt-solver", smt_solver]
            return cmd
        if "{benchmark}" not in self.invocation:
            raise HarnessError(f"solver {self.id}: invocation has no {{benchmark}} placeholder")
        return [
            tok.replace("{benchmark}", benchmark).replace("{timeout}", f"{timeout:g}")
            for tok in shlex.split(self.invocation)
        ]


@dataclass
class RunRecord:
    solver_id: str
    benchmark_id: str
    status: str
    wall_seconds: float
    solution_text: str | None = None
    solution_size: int | None = None
    detail: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.wall_seconds < 0:
            raise ValueError("wall_seconds must be nonnegative")
        if self.solution_size is not None and self.solution_size < 1:
            raise ValueError("solution_size must be positive")

    @property
    def solved(self) -> bool:
        return self.status == "Solved"

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=False)


FIELDS = [f.name for f in dataclasses.fields(RunRecord)]


@dataclass
class RunConfig:
    benchmarks: list[str]
    solvers: list[SolverSpec]
    wall_limit: float = 3600.0
    memory_limit_mb: int | None = None
    workers: int = 1
    out_dir: str = "runs"
    smt_solver: str | None = None
    check_timeout: float = 60.0
    grace: float = GRACE_SECONDS

    def __post_init__(self):
        if self.wall_limit <= 0 or self.check_timeout <= 0 or self.grace < 0:
            raise ValueError("limits must be positive")
        if self.memory_limit_mb is not None and self.memory_limit_mb <= 0:
            raise ValueError("memory limit must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        ids = [s.id for s in self.solvers]
        dup = {i for i in ids if ids.count(i) > 1}
        if dup:
            raise ValueError(f"duplicate solver id {sorted(dup)[0]}")

    @property
    def records_path(self) -> Path:
        return Path(self.out_dir) / "records.jsonl"


def load_config(path: str | os.PathLike) -> RunConfig:
    """Read a key-value run file::

        benchmarks = benchmarks/desk/*.sl
        solver.ref = builtin
        solver.mine = ./mysolver --in {benchmark}
        wall_limit = 60
        workers = 2
        out = runs/desk

    Relative paths and globs resolve against the file's directory.
    """
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + path.read_text(), source=str(path))
    except configparser.Error as e:
        raise HarnessError(f"{path}: {e}") from None
    kv = dict(parser["run"])
    base = path.parent

    def resolve(p: str) -> str:
        return str(base / p) if not os.path.isabs(p) else p

    benches: list[str] = []
    for pattern in kv.pop("benchmarks", "").split():
        hits = sorted(glob.glob(resolve(pattern)))
        if not hits:
            raise HarnessError(f"{path}: no benchmark matches {pattern}")
        benches.extend(hits)
    solvers = [SolverSpec(k[len("solver."):], v.strip()) for k, v in kv.items() if k.startswith("solver.")]
    for k in [k for k in kv if k.startswith("solver.")]:
        del kv[k]
    cfg = dict(benchmarks=benches, solvers=solvers)
    conv = {"wall_limit": float, "memory_limit_mb": int, "workers": int,
            "check_timeout": float, "grace": float, "smt_solver": str}
    for key, value in kv.items():
        if key == "out":
            cfg["out_dir"] = resolve(value.strip())
        elif key in conv:
            try:
                cfg[key] = conv[key](value.strip())
            except ValueError:
                raise HarnessError(f"{path}: bad value for {key}: {value!r}") from None
        else:
            raise HarnessError(f"{path}: unknown key {key}")
    if not benches:
        raise HarnessError(f"{path}: no benchmarks")
    if not solvers:
        raise HarnessError(f"{path}: no solvers")
    try:
        return RunConfig(**cfg)
    except ValueError as e:
        raise HarnessError(f"{path}: {e}") from None


class _Sink:
    """Serialized, durable JSON-lines appender."""

    def __init__(self, path: Path):
        path.parent.mkdir(parents=True, exist_ok=True)
        self.f = open(path, "a", encoding="utf-8")
        self.lock = threading.Lock()

    def write(self, rec: RunRecord) -> None:
        with self.lock:
            self.f.write(rec.to_json() + "\n")
            self.f.flush()
            os.fsync(self.f.fileno())

    def close(self):
        self.f.close()


def _limit_memory(mb: int | None):
    if mb is None:
        return None

    def apply():
        import resource

        limit = mb * 1024 * 1024
        resource.setrlimit(resource.RLIMIT_AS, (limit, limit))

    return apply


def _kill_group(proc: subprocess.Popen, sig: int) -> None:
    try:
        os.killpg(proc.pid, sig)
    except (ProcessLookupError, PermissionError):
        pass


def run_one(spec: SolverSpec, benchmark: str, problem: Problem, cfg: RunConfig,
            session: SmtSession | None = None) -> RunRecord:
    """Run a single solver on a single benchmark and classify the outcome."""
    cmd = spec.command(benchmark, cfg.wall_limit, cfg.smt_solver)
    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            cmd, stdin=subprocess.DEVNULL, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
            text=True, start_new_session=True, preexec_fn=_limit_memory(cfg.memory_limit_mb),
        )
    except OSError as e:
        return RunRecord(spec.id, benchmark, "Crash", 0.0, detail=f"cannot start {cmd[0]}: {e}")
    timed_out = False
    try:
        out, err = proc.communicate(timeout=cfg.wall_limit)
    except subprocess.TimeoutExpired:
        timed_out = True
        _kill_group(proc, signal.SIGTERM)
        try:
            out, err = proc.communicate(timeout=cfg.grace)
        except subprocess.TimeoutExpired:
            _kill_group(proc, signal.SIGKILL)
            out, err = proc.communicate()
    wall = time.monotonic() - start
    if timed_out:
        return RunRecord(spec.id, benchmark, "Timeout", wall,
                         detail=f"killed after {cfg.wall_limit:g} s")
    if proc.returncode != 0 and not out.strip():
        tail = err.strip().splitlines()[-1:] if err else []
        return RunRecord(spec.id, benchmark, "Crash", wall,
                         detail=f"exit code {proc.returncode}" + (f": {tail[0]}" if tail else ""))
    return classify(spec.id, benchmark, problem, out, wall, session or SmtSession.create(
        cfg.smt_solver, timeout=cfg.check_timeout))


_STATUS = {
    Valid: "Solved",
    Invalid: "SemanticReject",
    SyntacticReject: "SyntacticReject",
    IllFormed: "IllFormed",
    Unknown: "Unknown",
}


def classify(solver_id: str, benchmark: str, problem: Problem, output: str, wall: float,
             session: SmtSession) -> RunRecord:
    """Route a solver's output through both postprocessors."""
    size = None
    try:
        cands = parse_candidate(output, problem)
        size = sum(term_size(c.body) for c in cands)
    except (ParseError, SortError):
        pass
    try:
        verdict = check_solution(problem, output, session)
    except BackendError as e:
        return RunRecord(solver_id, benchmark, "Unknown", wall, output, size, detail=f"checker: {e}")
    detail = ""
    if isinstance(verdict, (SyntacticReject, IllFormed)):
        detail = verdict.detail
    elif isinstance(verdict, Unknown):
        detail = verdict.reason
    elif isinstance(verdict, Invalid):
        from .verifier import format_counterexample

        detail = "counterexample " + format_counterexample(verdict.counterexample)
    return RunRecord(solver_id, benchmark, _STATUS[type(verdict)], wall, output, size, detail)


def run_suite(cfg: RunConfig, sink_path: str | os.PathLike | None = None) -> list[RunRecord]:
    """Run every solver on every benchmark; records are appended as they finish.

    All benchmarks are parsed first so a bad suite fails before anything runs.
    Returns the records in (solver, benchmark) configuration order.
    """
    problems = {}
    for b in cfg.benchmarks:
        try:
            problems[b] = parse_problem(Path(b).read_text())
        except (OSError, ParseError, SortError) as e:
            raise HarnessError(f"cannot load benchmark {b}: {e}") from None
    sink = _Sink(Path(sink_path) if sink_path else cfg.records_path)
    local = threading.local()

    def session() -> SmtSession:
        if not hasattr(local, "session"):
            local.session = SmtSession.create(cfg.smt_solver, timeout=cfg.check_timeout)
        return local.session

    def task(spec: SolverSpec, b: str) -> RunRecord:
        try:
            rec = run_one(spec, b, problems[b], cfg, session())
        except BackendError as e:
            rec = RunRecord(spec.id, b, "Unknown", 0.0, detail=f"checker: {e}")
        sink.write(rec)
        log.info("%s %s: %s (%.2f s)", spec.id, b, rec.status, rec.wall_seconds)
        return rec

    jobs = [(s, b) for s in cfg.solvers for b in cfg.benchmarks]
    try:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(lambda j: task(*j), jobs))
    finally:
        sink.close()
    return records


def load_records(path: str | os.PathLike) -> list[RunRecord]:
    out: list[RunRecord] = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("not an object")
                unknown = set(obj) - set(FIELDS)
                if unknown:
                    raise ValueError(f"unknown field {sorted(unknown)[0]}")
                rec = RunRecord(**obj)
            except (ValueError, TypeError) as e:
                raise RecordFileError(f"{path}:{lineno}: malformed record: {e}") from None
            key = (rec.solver_id, rec.benchmark_id)
            if key in seen:
                raise RecordFileError(
                    f"{path}:{lineno}: duplicate record for solver {key[0]} on {key[1]}"
                )
            seen.add(key)
            out.append(rec)
    return out


def write_records(records: Iterable[RunRecord], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(r.to_json() + "\n")


def write_csv(records: Sequence[RunRecord], path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=FIELDS)
        w.writeheader()
        for r in records:
            w.writerow(dataclasses.asdict(r))
