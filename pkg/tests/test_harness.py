import json
import sys

import pytest

from syguskit.harness import (
    RecordFileError,
    HarnessError,
    RunConfig,
    RunRecord,
    SolverSpec,
    classify,
    load_config,
    load_records,
    run_one,
    run_suite,
    write_csv,
    write_records,
)
from syguskit.parser import parse_problem

from conftest import DESK, requires_smt
from stubs import MAX2_ANSWER, make_stub

BENCH = str(DESK / "max2.sl")


@pytest.fixture
def problem():
    return parse_problem((DESK / "max2.sl").read_text())


def cfg(wall=10.0, **kw):
    return RunConfig([BENCH], [], wall_limit=wall, **kw)


def test_builtin_command():
    cmd = SolverSpec("ref").command("b.sl", 30, "z3")
    assert cmd[:4] == [sys.executable, "-m", "syguskit", "solve"]
    assert cmd[4:] == ["b.sl", "--timeout", "30", "--smt-solver", "z3"]


def test_template_command():
    spec = SolverSpec("x", "mysolver --budget {timeout} '{benchmark}'")
    assert spec.command("a b.sl", 5.5) == ["mysolver", "--budget", "5.5", "a b.sl"]
    with pytest.raises(HarnessError):
        SolverSpec("x", "mysolver").command("a.sl", 1)


@requires_smt
@pytest.mark.parametrize("behaviour, status", [
    ("correct", "Solved"),
    ("wrong", "SemanticReject"),
    ("truncated", "IllFormed"),
    ("crasher", "Crash"),
])
def test_stub_outcomes(tmp_path, problem, session, behaviour, status):
    rec = run_one(SolverSpec(behaviour, make_stub(tmp_path, behaviour)), BENCH, problem, cfg(), session)
    assert rec.status == status
    if status == "Solved":
        assert rec.solution_size == 6
        assert rec.solution_text.strip() == MAX2_ANSWER
    if status == "Crash":
        assert "boom" in rec.detail


def test_missing_binary_is_a_crash(problem):
    rec = run_one(SolverSpec("ghost", "/nonexistent/solver {benchmark}"), BENCH, problem, cfg())
    assert rec.status == "Crash"
    assert "cannot start" in rec.detail


@pytest.mark.parametrize("behaviour", ["sleeper", "stubborn"])
def test_timeout_is_enforced(tmp_path, problem, behaviour):
    rec = run_one(SolverSpec(behaviour, make_stub(tmp_path, behaviour)), BENCH, problem,
                  cfg(wall=1.0, grace=1.0))
    assert rec.status == "Timeout"
    assert 1.0 <= rec.wall_seconds <= 3.0


@requires_smt
def test_classify_syntactic_reject(problem, session):
    out = "(define-fun max2 ((x Int) (y Int)) Int (* x y))"
    assert classify("s", BENCH, problem, out, 0.1, session).status == "SyntacticReject"


@requires_smt
def test_run_suite_appends_records(tmp_path, session):
    good = make_stub(tmp_path, "correct")
    bad = make_stub(tmp_path, "wrong")
    c = RunConfig([BENCH], [SolverSpec("good", good), SolverSpec("bad", bad)],
                  wall_limit=10, workers=2, out_dir=str(tmp_path / "out"))
    recs = run_suite(c)
    assert [(r.solver_id, r.status) for r in recs] == [("good", "Solved"), ("bad", "SemanticReject")]
    on_disk = load_records(c.records_path)
    assert sorted(r.solver_id for r in on_disk) == ["bad", "good"]


def test_run_suite_rejects_bad_benchmark(tmp_path):
    broken = tmp_path / "broken.sl"
    broken.write_text("(synth-fun f (")
    c = RunConfig([str(broken)], [SolverSpec("s", "x {benchmark}")], out_dir=str(tmp_path))
    with pytest.raises(HarnessError, match="broken.sl"):
        run_suite(c)
    assert not (tmp_path / "records.jsonl").exists()


def test_record_validation():
    with pytest.raises(ValueError):
        RunRecord("s", "b", "Done", 1.0)
    with pytest.raises(ValueError):
        RunRecord("s", "b", "Solved", -1.0)
    with pytest.raises(ValueError):
        RunRecord("s", "b", "Solved", 1.0, "(define-fun f () Int 0)", 0)


RECS = [
    RunRecord("a", "b1", "Solved", 0.5, "(define-fun f () Int 0)", 1),
    RunRecord("a", "b2", "Timeout", 3600.0, detail="killed"),
    RunRecord("b", "b1", "Crash", 0.01, detail="exit code 3: ünïcode"),
]


def test_records_round_trip(tmp_path):
    p = tmp_path / "r.jsonl"
    write_records(RECS, p)
    assert load_records(p) == RECS


def test_empty_record_file(tmp_path):
    p = tmp_path / "r.jsonl"
    p.write_text("")
    assert load_records(p) == []


def test_malformed_record_names_line(tmp_path):
    p = tmp_path / "r.jsonl"
    p.write_text(RECS[0].to_json() + "\n{not json\n")
    with pytest.raises(RecordFileError, match=r"r\.jsonl:2"):
        load_records(p)


def test_unknown_field_rejected(tmp_path):
    p = tmp_path / "r.jsonl"
    obj = json.loads(RECS[0].to_json())
    obj["memory"] = 3
    p.write_text(json.dumps(obj) + "\n")
    with pytest.raises(RecordFileError, match="unknown field memory"):
        load_records(p)


def test_duplicate_pair_rejected(tmp_path):
    p = tmp_path / "r.jsonl"
    write_records([RECS[0], RECS[0]], p)
    with pytest.raises(RecordFileError, match="duplicate"):
        load_records(p)


def test_csv_export(tmp_path):
    p = tmp_path / "r.csv"
    write_csv(RECS, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "solver_id,benchmark_id,status,wall_seconds,solution_text,solution_size,detail"
    assert len(lines) == 4


def test_load_config(tmp_path):
    (tmp_path / "suite").mkdir()
    for n in ("a", "b"):
        (tmp_path / "suite" / f"{n}.sl").write_text("")
    p = tmp_path / "run.cfg"
    p.write_text("# desk run\nbenchmarks = suite/*.sl\nsolver.ref = builtin\n"
                 "solver.other = other --in {benchmark}\nwall_limit = 30\nworkers = 2\nout = runs/x\n")
    c = load_config(p)
    assert [b.rsplit("/", 1)[1] for b in c.benchmarks] == ["a.sl", "b.sl"]
    assert [s.id for s in c.solvers] == ["ref", "other"]
    assert c.solvers[1].invocation == "other --in {benchmark}"
    assert (c.wall_limit, c.workers) == (30.0, 2)
    assert c.records_path == tmp_path / "runs" / "x" / "records.jsonl"


@pytest.mark.parametrize("body, message", [
    ("benchmarks = nothing/*.sl\nsolver.r = builtin\n", "no benchmark matches"),
    ("benchmarks = run.cfg\n", "no solvers"),
    ("benchmarks = run.cfg\nsolver.r = builtin\ncolour = blue\n", "unknown key colour"),
    ("benchmarks = run.cfg\nsolver.r = builtin\nworkers = many\n", "bad value for workers"),
    ("benchmarks = run.cfg\nsolver.r = builtin\nworkers = 0\n", "workers"),
])
def test_bad_config(tmp_path, body, message):
    p = tmp_path / "run.cfg"
    p.write_text(body)
    with pytest.raises(HarnessError, match=message):
        load_config(p)
