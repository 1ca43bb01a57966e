"""Two-stage solution checking: grammar membership, then validity via SMT."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .grammar import derives, first_underivable
from .parser import parse_candidate
from .printer import print_term
from .semantics import Env, holds_at
from .sexpr import ParseError
from .smt import ModelError, SmtSession
from .sorts import BOOL, SortError
from .terms import Apply, Candidate, Problem, SubstitutionError, Term, Var, inline_calls


class DesugarError(Exception):
    pass


@dataclass(frozen=True)
class Valid:
    label = "valid"


@dataclass(frozen=True)
class Invalid:
    counterexample: dict = field(default_factory=dict)
    label = "invalid"


@dataclass(frozen=True)
class Unknown:
    reason: str = ""
    label = "unknown"


@dataclass(frozen=True)
class SyntacticReject:
    detail: str = ""
    label = "syntactic-reject"


@dataclass(frozen=True)
class IllFormed:
    detail: str = ""
    label = "ill-formed"


Verdict = Valid | Invalid | Unknown | SyntacticReject | IllFormed


def _app(name: str, args) -> Apply:
    return Apply(name, tuple(Var(n) for n in args))


def desugar_inv(p: Problem) -> Problem:
    """Expand every inv-constraint into its three implications over the
    state variables and their primed copies."""
    if not p.inv_constraints:
        return replace(p, kind="General")
    primed = [n for n, _ in p.primed_vars]
    state = [n[:-1] for n in primed]
    sigs = p.signatures()
    synth_names = {sf.name for sf in p.synth_funs}
    n = len(state)
    extra: list[Term] = []
    for ic in p.inv_constraints:
        for role, name, arity in (("inv", ic.inv, n), ("pre", ic.pre, n),
                                  ("trans", ic.trans, 2 * n), ("post", ic.post, n)):
            if name not in sigs:
                raise DesugarError(f"inv-constraint {role} function {name} is not declared")
            params, ret = sigs[name]
            if len(params) != arity:
                raise DesugarError(
                    f"inv-constraint {role} function {name} takes {len(params)} arguments, "
                    f"expected {arity} for {n} state variables"
                )
            if ret != BOOL:
                raise DesugarError(f"inv-constraint {role} function {name} must return Bool")
        if ic.inv not in synth_names:
            raise DesugarError(f"{ic.inv} is not a function to synthesize")
        inv_x = _app(ic.inv, state)
        inv_xp = _app(ic.inv, primed)
        extra.append(Apply("=>", (_app(ic.pre, state), inv_x)))
        extra.append(Apply("=>", (Apply("and", (inv_x, _app(ic.trans, state + primed))), inv_xp)))
        extra.append(Apply("=>", (inv_x, _app(ic.post, state))))
    return replace(p, constraints=p.constraints + tuple(extra), inv_constraints=(), kind="General")


def spec_formula(p: Problem, cands: Sequence[Candidate]) -> Term:
    """Conjunction of the constraints with candidates and defined functions inlined."""
    defs = p.fun_table()
    body = Apply("and", tuple(p.constraints)) if len(p.constraints) != 1 else p.constraints[0]
    if not p.constraints:
        from .terms import mk_bool

        return mk_bool(True)
    # definitions may call earlier definitions, so inline until fixpoint
    for c in cands:
        defs[c.target] = c.as_fundef()
    prev = None
    rounds = 0
    while prev != body:
        if rounds > len(defs):
            raise SubstitutionError("definitions are recursive")
        prev = body
        body = inline_calls(body, defs)
        rounds += 1
    return body


def verify(p: Problem, cands: Sequence[Candidate], session: SmtSession) -> Verdict:
    """Semantic check: are the constraints valid with the candidates plugged in?"""
    if p.kind == "Invariant" or p.inv_constraints:
        p = desugar_inv(p)
    targets = {c.target for c in cands}
    missing = [sf.name for sf in p.synth_funs if sf.name not in targets]
    if missing:
        raise ValueError(f"no candidate for {', '.join(missing)}")
    phi = spec_formula(p, cands)
    decls = dict(p.all_vars)
    result = session.check(p.logic, decls, [Apply("not", (phi,))])
    if result.status == "unsat":
        return Valid()
    if result.status == "sat":
        cex = result.model
        if holds_at(p, cands, cex):
            raise ModelError(
                "backend model does not falsify the constraints under local evaluation: "
                + ", ".join(f"{k}={v}" for k, v in cex.items())
            )
        return Invalid(cex)
    return Unknown(result.reason or result.status)


def grammar_check(p: Problem, cands: Sequence[Candidate]) -> SyntacticReject | None:
    for c in cands:
        sf = p.synth_fun(c.target)
        if sf.grammar is None:
            continue
        if not derives(sf.grammar, c.body, sf.params):
            bad = first_underivable(sf.grammar, c.body, sf.params)
            return SyntacticReject(
                f"{c.target}: {print_term(bad)} is not derivable from the grammar"
            )
    return None


def check_solution(p: Problem, solver_output: str, session: SmtSession) -> Verdict:
    """Parse, grammar-check, then verify a solver's output; the first failing stage decides."""
    try:
        cands = parse_candidate(solver_output, p)
    except (ParseError, SortError) as e:
        return IllFormed(str(e))
    reject = grammar_check(p, cands)
    if reject is not None:
        return reject
    if p.kind == "Invariant":
        try:
            p = desugar_inv(p)
        except DesugarError as e:
            return IllFormed(str(e))
    return verify(p, cands, session)


def format_counterexample(cex: Env) -> str:
    from .smt import smt_value

    return " ".join(f"{k}={smt_value(v)}" for k, v in cex.items())
