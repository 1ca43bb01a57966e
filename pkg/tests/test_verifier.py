import sys

import pytest

from syguskit.parser import parse_candidate, parse_problem, parse_term
from syguskit.semantics import holds_at
from syguskit.smt import BackendError, SmtSession, backend_logic
from syguskit.terms import Apply, Var
from syguskit.verifier import (
    DesugarError,
    IllFormed,
    Invalid,
    SyntacticReject,
    Unknown,
    Valid,
    check_solution,
    desugar_inv,
    verify,
)

from conftest import DESK, FIXTURES, MAX2
from desk import MUTATIONS, NAMES, problem_text, solution_text

GOOD = "(define-fun max2 ((x Int) (y Int)) Int (ite (>= x y) x y))"
SWAPPED = "(define-fun max2 ((x Int) (y Int)) Int (ite (>= x y) y x))"


def test_desugar_lockstep():
    p = parse_problem(problem_text("inv_lockstep"))
    d = desugar_inv(p)
    assert d.kind == "General"
    assert len(d.constraints) == len(p.constraints) + 3
    expected = [
        "(=> (pre_fun x y) (inv_fun x y))",
        "(=> (and (inv_fun x y) (trans_fun x y x! y!)) (inv_fun x! y!))",
        "(=> (inv_fun x y) (post_fun x y))",
    ]
    assert list(d.constraints[-3:]) == [parse_term(e) for e in expected]


def test_desugar_without_inv_constraint_is_identity(max2):
    d = desugar_inv(max2)
    assert d.constraints == max2.constraints


def test_desugar_arity_mismatch():
    text = problem_text("inv_lockstep").replace(
        "(define-fun post_fun ((x Int) (y Int)) Bool\n  (= x y))",
        "(define-fun post_fun ((x Int)) Bool\n  (= x 0))")
    with pytest.raises(DesugarError, match="post"):
        desugar_inv(parse_problem(text))


def test_desugar_unresolved_name():
    text = problem_text("inv_lockstep").replace("(inv-constraint inv_fun pre_fun", "(inv-constraint inv_fun pre_gun")
    with pytest.raises(DesugarError, match="pre_gun"):
        desugar_inv(parse_problem(text))


def test_verify_valid(max2, session):
    assert verify(max2, parse_candidate(GOOD, max2), session) == Valid()


def test_verify_invalid_counterexample_falsifies(max2, session):
    cands = parse_candidate(SWAPPED, max2)
    v = verify(max2, cands, session)
    assert isinstance(v, Invalid)
    assert set(v.counterexample) == {"x", "y"}
    assert v.counterexample["x"] != v.counterexample["y"]
    assert not holds_at(max2, cands, v.counterexample)


def test_verify_stable_under_constraint_reordering(max2, session):
    from dataclasses import replace

    flipped = replace(max2, constraints=tuple(reversed(max2.constraints)))
    assert verify(flipped, parse_candidate(GOOD, flipped), session) == Valid()


def test_check_solution_stages(max2, session):
    assert check_solution(max2, GOOD, session) == Valid()
    assert isinstance(check_solution(max2, "(define-fun max2 (", session), IllFormed)
    oog = check_solution(max2, "(define-fun max2 ((x Int) (y Int)) Int (* x y))", session)
    assert isinstance(oog, SyntacticReject)
    assert "(* x y)" in oog.detail


def test_syntactic_stage_first(session):
    p = parse_problem(MAX2.replace("(- Start Start) ", ""))
    # wrong and out of grammar: stage one decides
    v = check_solution(p, "(define-fun max2 ((x Int) (y Int)) Int (- x y))", session)
    assert isinstance(v, SyntacticReject)
    assert "(- x y)" in v.detail


def test_backend_killed_is_an_error(max2):
    dying = SmtSession(command=[sys.executable, "-c", "import os, sys; sys.stdin.readline(); os.kill(os.getpid(), 9)"])
    with pytest.raises(BackendError):
        verify(max2, parse_candidate(GOOD, max2), dying)


def test_backend_timeout_is_unknown(max2):
    slow = SmtSession(command=[sys.executable, "-c", "import time; time.sleep(30)"], timeout=0.5)
    v = verify(max2, parse_candidate(GOOD, max2), slow)
    assert isinstance(v, Unknown)


def test_backend_logic_mapping():
    assert backend_logic("LIA") == "LIA"
    assert backend_logic("BV") == "BV"
    assert backend_logic("SLIA") == "QF_SLIA"
    assert backend_logic("ALL") == "ALL"


def test_two_function_solution(session):
    p = parse_problem((FIXTURES / "two_funs.sl").read_text())
    good = "(define-fun f ((x Int)) Int (+ x x))(define-fun g ((x Int)) Int (+ (f x) 1))"
    bad = "(define-fun f ((x Int)) Int (+ x x))(define-fun g ((x Int)) Int (f x))"
    assert check_solution(p, good, session) == Valid()
    assert isinstance(check_solution(p, bad, session), Invalid)


@pytest.mark.parametrize("name", NAMES)
def test_desk_known_good(name, session):
    p = parse_problem(problem_text(name))
    assert check_solution(p, solution_text(name), session) == Valid()


@pytest.mark.parametrize("mutation", MUTATIONS)
@pytest.mark.parametrize("name", NAMES)
def test_desk_mutations_rejected(name, mutation, session):
    p = parse_problem(problem_text(name))
    out = solution_text(name, mutation)
    v = check_solution(p, out, session)
    assert isinstance(v, (Invalid, SyntacticReject)), v
    if isinstance(v, Invalid):
        cands = parse_candidate(out, p)
        assert not holds_at(desugar_inv(p), cands, v.counterexample)
