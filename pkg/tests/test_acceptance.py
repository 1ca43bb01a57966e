"""Acceptance criteria, one test each. Every test records a PASS/FAIL line
that is printed in the terminal summary."""

import time
from concurrent.futures import ThreadPoolExecutor

import pytest

from syguskit.grammar import constant_pool, derives, enumerate_terms
from syguskit.harness import RunConfig, RunRecord, SolverSpec, load_records, run_one, write_records
from syguskit.parser import parse_candidate, parse_problem
from syguskit.report import load_categories, report
from syguskit.scoring import SIZE_BOUNDS, TIME_BOUNDS, score, size_bucket, time_bucket
from syguskit.semantics import holds_at
from syguskit.solver import Budget, SolveStats, Unsolved, solve
from syguskit.terms import Candidate
from syguskit.verifier import Invalid, SyntacticReject, Valid, check_solution, desugar_inv

from conftest import ACCEPTANCE, DESK, FIXTURES
from crosscheck import disagreements
from desk import MUTATIONS, NAMES, problem_text, solution_text
from oracles import SEEDS, derivable_set, literal_pool, seed_problem, universe
from stubs import make_stub


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE[n] = line
    print(line)
    assert ok, line


def test_criterion_1_grammar_oracle():
    start = time.monotonic()
    probed = mismatches = 0
    for name, seed in SEEDS.items():
        sf = seed_problem(name).synth_funs[0]
        truth = derivable_set(sf.grammar, 7, dict(sf.params), literal_pool(seed["leaves"]))
        for t in universe(seed["sig"], seed["leaves"], sf.return_sort, 7):
            probed += 1
            mismatches += derives(sf.grammar, t, sf.params) != (t in truth)
        pool = {s: constant_pool(s) for s in seed["leaves"]}
        out = list(enumerate_terms(sf.grammar, 7, sf.params))
        enum_truth = derivable_set(sf.grammar, 7, dict(sf.params), pool)
        mismatches += len(out) != len(set(out)) or set(out) != enum_truth
    elapsed = time.monotonic() - start
    record(1, mismatches == 0 and elapsed < 60,
           f"{len(SEEDS)} seed grammars, {probed} probe terms, {mismatches} mismatches, {elapsed:.1f} s")


def test_criterion_2_bucket_exactness():
    eps = 1e-9
    wrong = []
    for i, b in enumerate(TIME_BOUNDS):
        for t, want in ((b, i + 1), (b - eps, i), (b + eps, i + 1)):
            if time_bucket(t) != want:
                wrong.append(f"time {t}")
    for i, b in enumerate(SIZE_BOUNDS):
        for n, want in ((b, i + 1), (b - 1, i), (b + 1, i + 1)):
            if size_bucket(n) != want:
                wrong.append(f"size {n}")
    for got, want, what in ((time_bucket(0.0), 0, "time 0"), (time_bucket(138), 5, "time 138"),
                            (size_bucket(1), 0, "size 1"), (size_bucket(3), 0, "size 3")):
        if got != want:
            wrong.append(what)
    checked = 3 * (len(TIME_BOUNDS) + len(SIZE_BOUNDS)) + 4
    record(2, not wrong, f"{checked} boundary checks, wrong: {wrong or 'none'}")


def _score_text(records, cats):
    cards, _ = score(records)
    bundle = report(records, cats)
    return ("\n".join(c.line() for c in cards) + bundle.table_csv() + bundle.table_text()
            + bundle.detail_csv() + "".join(bundle.svg.values()))


def test_criterion_3_scoring_fixtures():
    general = load_records(FIXTURES / "general_track.jsonl")
    cards, _ = score(general)
    got = {k: [getattr(c, k) for c in cards] for k in ("N", "F", "unique")}
    clia = [c.N for c in score(load_records(FIXTURES / "clia.jsonl"))[0]]
    cats = load_categories(FIXTURES / "general_categories.csv")
    outputs = {_score_text(load_records(FIXTURES / "general_track.jsonl"), cats) for _ in range(3)}
    ok = (got == {"N": [448, 420, 398], "F": [366, 266, 252], "unique": [12, 9, 0]}
          and clia == [85, 84, 81] and len(outputs) == 1)
    record(3, ok, f"general N/F/unique {got['N']}/{got['F']}/{got['unique']}, CLIA N {clia}, "
                  f"{len(outputs)} distinct output(s) over 3 runs")


def test_criterion_4_mutation_suite(session):
    start = time.monotonic()
    failures = []
    for name in NAMES:
        p = parse_problem(problem_text(name))
        if check_solution(p, solution_text(name), session) != Valid():
            failures.append(f"{name}: good solution not valid")
        for m in MUTATIONS:
            out = solution_text(name, m)
            v = check_solution(p, out, session)
            if isinstance(v, Invalid):
                if holds_at(desugar_inv(p), parse_candidate(out, p), v.counterexample):
                    failures.append(f"{name}.{m}: counterexample satisfies the constraints")
            elif not isinstance(v, SyntacticReject):
                failures.append(f"{name}.{m}: {v.label}")
    elapsed = time.monotonic() - start
    record(4, not failures and elapsed < 300,
           f"{len(NAMES)} benchmarks x {1 + len(MUTATIONS)} solutions, {elapsed:.1f} s, "
           f"failures: {failures or 'none'}")


@pytest.fixture(scope="module")
def desk_runs(session):
    """Reference solver on every desk benchmark: name -> (problem, candidates or None, stats, seconds)."""
    runs = {}
    for name in NAMES:
        p = parse_problem(problem_text(name))
        stats = SolveStats()
        start = time.monotonic()
        try:
            cands = solve(p, Budget(wall_seconds=60), session, stats)
        except Unsolved:
            cands = None
        runs[name] = (p, cands, stats, time.monotonic() - start)
    return runs


def test_criterion_5_reference_solver(desk_runs, session):
    solved, bad = [], []
    for name, (p, cands, _, secs) in desk_runs.items():
        if cands is None or secs > 60:
            continue
        text = "\n".join(c.define_fun() for c in cands)
        if check_solution(p, text, session) == Valid():
            solved.append(name)
        else:
            bad.append(name)
    unsolved = sorted(set(desk_runs) - set(solved) - set(bad))
    record(5, len(solved) >= 8 and not bad,
           f"solved {len(solved)}/{len(desk_runs)} within 60 s, self-inconsistent: {bad or 'none'}, "
           f"unsolved: {unsolved or 'none'}")


def test_criterion_6_semantics_crosscheck(session):
    n = 250
    bad = {th: disagreements(th, n, session, seed=7) for th in ("int", "bv", "string")}
    total = sum(len(v) for v in bad.values())
    record(6, total == 0,
           f"{n} terms per theory (int, bv, string), disagreements: "
           + ", ".join(f"{k}={len(v)}" for k, v in bad.items()))


def test_criterion_7_harness_limits(tmp_path):
    bench = str(DESK / "max2.sl")
    p = parse_problem(problem_text("max2"))
    cfg = RunConfig([bench], [], wall_limit=2.0, grace=2.0)
    spec = SolverSpec("sleeper", make_stub(tmp_path, "sleeper"))
    with ThreadPoolExecutor(max_workers=4) as pool:
        recs = list(pool.map(lambda _: run_one(spec, bench, p, cfg), range(20)))
    good = sum(r.status == "Timeout" and r.wall_seconds <= 4.0 for r in recs)
    worst = max(r.wall_seconds for r in recs)
    sample = [
        RunRecord("a", "b1", "Solved", 0.25, "(define-fun f ((x Int)) Int (+ x 1))", 4),
        RunRecord("a", "b2", "Timeout", 2.0031, detail="killed after 2 s"),
        RunRecord("b", "b1", "SemanticReject", 1.5, "(define-fun f ((x Int)) Int x)", 1, "λ"),
    ] + [RunRecord(r.solver_id, f"trial{i}", r.status, r.wall_seconds, detail=r.detail)
         for i, r in enumerate(recs)]
    path = tmp_path / "records.jsonl"
    write_records(sample, path)
    lossless = load_records(path) == sample
    record(7, good == 20 and lossless,
           f"{good}/20 timeouts within 4 s (worst {worst:.2f} s), round trip "
           f"{'lossless' if lossless else 'lossy'}")


def test_criterion_8_cegis_progress(desk_runs):
    problems = []
    rounds = []
    for name, (p, cands, stats, _) in desk_runs.items():
        if cands is None:
            continue
        rounds.append(stats.rounds)
        q = desugar_inv(p)
        sf = q.synth_funs[0]
        if stats.rounds > Budget().max_rounds or len(stats.candidates) != stats.rounds:
            problems.append(f"{name}: {stats.rounds} rounds")
        # re-check the in-loop assertions independently of how Python was run
        for i, cex in enumerate(stats.counterexamples):
            cand = Candidate(sf.name, sf.params, sf.return_sort, stats.candidates[i])
            if holds_at(q, [cand], cex) or cex in stats.counterexamples[:i]:
                problems.append(f"{name}: round {i + 1} counterexample was not new")
    record(8, bool(rounds) and not problems,
           f"{len(rounds)} solved benchmarks, max {max(rounds, default=0)} rounds "
           f"(limit {Budget().max_rounds}), violations: {problems or 'none'}")
