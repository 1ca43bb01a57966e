import pytest
from hypothesis import given, settings, strategies as st

from syguskit.parser import parse_problem, parse_term
from syguskit.semantics import BV, EvalError, ediv, emod, eval_term, holds_at
from syguskit.sorts import INT
from syguskit.terms import Apply, Candidate, Var, mk_int

from conftest import requires_smt
from crosscheck import disagreements
from strategies import int_envs, int_terms

PROBLEM = parse_problem(
    "(set-logic LIA)(synth-fun f ((z Int)) Int)(declare-var x Int)"
    "(constraint (= (f x) (+ x 1)))(check-synth)"
)


def ev(text, env=None):
    return eval_term(parse_term(text), env or {})


def test_basic_arithmetic():
    assert ev("(+ 1 2)") == 3
    assert ev('(str.++ "ab" "c")') == "abc"


@pytest.mark.parametrize("text,value", [
    ("(div 7 (- 2))", -3),
    ("(mod 7 (- 2))", 1),
    ("(div (- 7) 2)", -4),
    ("(mod (- 7) 2)", 1),
    ("(div (- 7) (- 2))", 4),
    ("(mod (- 7) (- 2))", 1),
    ("(div 7 0)", 0),
    ("(mod 7 0)", 7),
])
def test_euclidean_division(text, value):
    assert ev(text) == value


@given(st.integers(-1000, 1000), st.integers(-50, 50).filter(bool))
def test_euclid_identity(a, b):
    q, r = ediv(a, b), emod(a, b)
    assert a == b * q + r
    assert 0 <= r < abs(b)


@pytest.mark.parametrize("text,value", [
    ('(str.at "abc" 5)', ""),
    ('(str.substr "abc" 1 10)', "bc"),
    ('(str.substr "abc" (- 1) 2)', ""),
    ('(str.indexof "abc" "c" 0)', 2),
    ('(str.indexof "abc" "z" 0)', -1),
    ('(str.indexof "abc" "" 4)', -1),
    ('(str.to.int "12")', 12),
    ('(str.to.int "1a")', -1),
    ('(str.to.int "")', -1),
    ('(int.to.str (- 3))', ""),
    ('(str.replace "aaa" "a" "b")', "baa"),
    ('(str.replace "abc" "" "x")', "xabc"),
])
def test_string_totalization(text, value):
    assert ev(text) == value


@pytest.mark.parametrize("text,value", [
    ("(bvudiv #x05 #x00)", BV(8, 255)),
    ("(bvurem #x05 #x00)", BV(8, 5)),
    ("(bvadd #xff #x01)", BV(8, 0)),
    ("(bvneg #x01)", BV(8, 255)),
    ("(bvashr #x80 #x01)", BV(8, 0xC0)),
    ("(bvshl #x01 #x08)", BV(8, 0)),
    ("(bvsdiv #xfe #x02)", BV(8, 0xFF)),
])
def test_bitvector_ops(text, value):
    assert ev(text) == value


def test_bv_comparisons_unsigned_and_signed():
    assert ev("(bvult #x01 #xff)") is True
    assert ev("(bvslt #x01 #xff)") is False


def test_unbound_variable():
    with pytest.raises(EvalError):
        ev("(+ x 1)")


def test_holds_at_examples():
    good = Candidate("f", (("z", INT),), INT, Apply("+", (Var("z"), mk_int(1))))
    bad = Candidate("f", (("z", INT),), INT, Var("z"))
    assert holds_at(PROBLEM, [good], {"x": 5})
    assert not holds_at(PROBLEM, [bad], {"x": 5})


def test_holds_at_is_a_conjunction():
    p = parse_problem(
        "(set-logic LIA)(synth-fun f ((z Int)) Int)(declare-var x Int)"
        "(constraint (>= (f x) x))(constraint (= (f x) (+ x 1)))(check-synth)"
    )
    ident = Candidate("f", (("z", INT),), INT, Var("z"))
    assert not holds_at(p, [ident], {"x": 3})


@given(int_terms(vars=["x"]), int_envs(vars=["x"]))
def test_holds_at_equals_conjunction_eval(body, env):
    c = Candidate("f", (("x", INT),), INT, body)
    conj = Apply("and", tuple(PROBLEM.constraints))
    assert holds_at(PROBLEM, [c], env) == eval_term(conj, env, {"f": c.as_fundef()})


@given(int_terms(), int_envs())
def test_eval_is_deterministic(t, env):
    assert eval_term(t, env) == eval_term(t, env)


@requires_smt
@pytest.mark.parametrize("theory", ["int", "bv", "string"])
def test_agrees_with_backend(theory, session):
    assert disagreements(theory, 60, session, seed=7) == []
