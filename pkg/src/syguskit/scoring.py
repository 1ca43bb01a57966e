"""Competition metrics: solved, among-the-fastest, among-the-smallest, uniquely solved.

Times and sizes are compared by pseudo-logarithmic bucket, never raw value,
so a solver is "among the fastest" on a benchmark when its time falls in the
same bucket as the quickest solver's.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

from .harness import RunRecord

TIME_BOUNDS = (1, 3, 10, 30, 100, 300, 1000, 3600)
SIZE_BOUNDS = (10, 30, 100, 300, 1000)
TIME_LABELS = ("[0,1)", "[1,3)", "[3,10)", "[10,30)", "[30,100)", "[100,300)",
               "[300,1000)", "[1000,3600)", ">=3600")
SIZE_LABELS = ("[1,10)", "[10,30)", "[30,100)", "[100,300)", "[300,1000)", ">=1000")


class ScoringError(ValueError):
    pass


def time_bucket(seconds: float) -> int:
    if not seconds >= 0:
        raise ValueError(f"time must be nonnegative, got {seconds}")
    return bisect.bisect_right(TIME_BOUNDS, seconds)


def size_bucket(size: int) -> int:
    if size < 1:
        raise ValueError(f"size must be positive, got {size}")
    return bisect.bisect_right(SIZE_BOUNDS, size)


@dataclass(frozen=True)
class ScoreCard:
    solver_id: str
    N: int
    F: int
    S: int
    unique: int

    def __post_init__(self):
        if not (0 <= self.F <= self.N and 0 <= self.S <= self.N and 0 <= self.unique <= self.N):
            raise ValueError(f"inconsistent score card {self}")

    @property
    def score(self) -> int:
        return 5 * self.N + 3 * self.F + self.S

    def line(self) -> str:
        return (f"{self.solver_id}: N={self.N} F={self.F} S={self.S} "
                f"unique={self.unique} score={self.score}")


@dataclass(frozen=True)
class BenchmarkDetail:
    benchmark_id: str
    solver_count: int
    min_time: float | None
    max_time: float | None
    min_size: int | None
    max_size: int | None
    fastest: tuple[str, ...]
    smallest: tuple[str, ...]
    solved_by: tuple[str, ...] = ()

    @property
    def unsolved(self) -> bool:
        return self.solver_count == 0


def _check_unique(records: Sequence[RunRecord]) -> None:
    seen = set()
    for r in records:
        key = (r.solver_id, r.benchmark_id)
        if key in seen:
            raise ScoringError(f"duplicate record for solver {key[0]} on {key[1]}")
        seen.add(key)


def benchmark_details(records: Sequence[RunRecord]) -> list[BenchmarkDetail]:
    """Per-benchmark summary in order of first appearance."""
    _check_unique(records)
    by_bench: dict[str, list[RunRecord]] = {}
    for r in records:
        by_bench.setdefault(r.benchmark_id, []).append(r)
    out = []
    for b, recs in by_bench.items():
        solved = [r for r in recs if r.solved]
        if not solved:
            out.append(BenchmarkDetail(b, 0, None, None, None, None, (), ()))
            continue
        times = [r.wall_seconds for r in solved]
        best_t = min(time_bucket(t) for t in times)
        fastest = tuple(r.solver_id for r in solved if time_bucket(r.wall_seconds) == best_t)
        sized = [r for r in solved if r.solution_size is not None]
        if sized:
            best_s = min(size_bucket(r.solution_size) for r in sized)
            smallest = tuple(r.solver_id for r in sized if size_bucket(r.solution_size) == best_s)
            sizes = [r.solution_size for r in sized]
            lo_s, hi_s = min(sizes), max(sizes)
        else:
            smallest, lo_s, hi_s = (), None, None
        out.append(BenchmarkDetail(b, len(solved), min(times), max(times), lo_s, hi_s,
                                   fastest, smallest, tuple(r.solver_id for r in solved)))
    return out


def score(records: Sequence[RunRecord]) -> tuple[list[ScoreCard], list[BenchmarkDetail]]:
    """Score cards (in order of first appearance) and per-benchmark details.

    A benchmark is solved uniquely by ``s`` when no other solver solved it.
    """
    details = benchmark_details(records)
    solvers = list(dict.fromkeys(r.solver_id for r in records))
    n = dict.fromkeys(solvers, 0)
    f = dict.fromkeys(solvers, 0)
    s = dict.fromkeys(solvers, 0)
    u = dict.fromkeys(solvers, 0)
    for d in details:
        for sid in d.solved_by:
            n[sid] += 1
        if d.solver_count == 1:
            u[d.solved_by[0]] += 1
        for sid in d.fastest:
            f[sid] += 1
        for sid in d.smallest:
            s[sid] += 1
    cards = [ScoreCard(sid, n[sid], f[sid], s[sid], u[sid]) for sid in solvers]
    return cards, details


def format_time(t: float | None) -> str:
    """Whole seconds, floored; a missing time renders as infinity."""
    return "∞" if t is None else str(math.floor(t))


def format_size(size: int | None) -> str:
    return "∞" if size is None or size > 1000 else str(size)
