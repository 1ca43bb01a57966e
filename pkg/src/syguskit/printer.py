"""Canonical s-expression printing for terms, grammars and problems."""

from __future__ import annotations

from .sexpr import is_simple_symbol
from .sorts import BOOL, INT, Sort
from .terms import (
    Apply,
    ConstantOfSort,
    FunDef,
    Grammar,
    Let,
    Literal,
    NonterminalRef,
    Problem,
    Term,
    Var,
    VariableOfSort,
)


def symbol(name: str) -> str:
    return name if is_simple_symbol(name) else f"|{name}|"


def quote_string(s: str) -> str:
    return '"' + s.replace('"', '""') + '"'


def bv_literal(value: int, width: int) -> str:
    return "#b" + format(value, f"0{width}b")


def print_literal(t: Literal) -> str:
    s = t.sort
    if s == BOOL:
        return "true" if t.value else "false"
    if s == INT:
        return str(t.value)
    if s.is_bv:
        return bv_literal(t.value, s.width)
    return quote_string(t.value)


def print_term(t: Term) -> str:
    """Canonical text of ``t``."""
    parts: list[str] = []
    _emit(t, parts)
    return "".join(parts)


def _emit(t: Term, out: list[str]) -> None:
    if isinstance(t, Literal):
        out.append(print_literal(t))
    elif isinstance(t, Var):
        out.append(symbol(t.name))
    elif isinstance(t, Apply):
        if not t.args:
            out.append(symbol(t.op))
            return
        out.append("(")
        out.append(symbol(t.op))
        for a in t.args:
            out.append(" ")
            _emit(a, out)
        out.append(")")
    elif isinstance(t, Let):
        out.append("(let (")
        for i, (n, b) in enumerate(t.bindings):
            if i:
                out.append(" ")
            out.append(f"({symbol(n)} ")
            _emit(b, out)
            out.append(")")
        out.append(") ")
        _emit(t.body, out)
        out.append(")")
    elif isinstance(t, NonterminalRef):
        out.append(symbol(t.name))
    elif isinstance(t, ConstantOfSort):
        out.append(f"(Constant {t.sort})")
    elif isinstance(t, VariableOfSort):
        out.append(f"(Variable {t.sort})")
    else:
        raise TypeError(f"not a term: {t!r}")


def print_params(params) -> str:
    return "(" + " ".join(f"({symbol(n)} {s})" for n, s in params) + ")"


def print_define_fun(fd: FunDef) -> str:
    return (
        f"(define-fun {symbol(fd.name)} {print_params(fd.params)} "
        f"{fd.return_sort} {print_term(fd.body)})"
    )


def print_grammar(g: Grammar) -> str:
    rules = []
    for p in g.productions:
        alts = " ".join(print_term(a) for a in p.alternatives)
        rules.append(f"({symbol(p.nonterminal)} {p.sort} ({alts}))")
    return "(" + "\n    ".join(rules) + ")"


def print_problem(p: Problem) -> str:
    """SyGuS-IF text for a parsed problem (normalized: one command per line)."""
    lines = [f"(set-logic {p.logic})"]
    for fd in p.defined_funs:
        lines.append(print_define_fun(fd))
    for sf in p.synth_funs:
        head = f"(synth-fun {symbol(sf.name)} {print_params(sf.params)} {sf.return_sort}"
        if sf.grammar is not None:
            lines.append(f"{head}\n  {print_grammar(sf.grammar)})")
        else:
            lines.append(head + ")")
    primed = {n for n, _ in p.primed_vars}
    for n, s in p.vars:
        if n + "!" in primed:
            lines.append(f"(declare-primed-var {symbol(n)} {s})")
        else:
            lines.append(f"(declare-var {symbol(n)} {s})")
    for c in p.constraints:
        lines.append(f"(constraint {print_term(c)})")
    for ic in p.inv_constraints:
        lines.append(f"(inv-constraint {ic.inv} {ic.pre} {ic.trans} {ic.post})")
    lines.append("(check-synth)")
    return "\n".join(lines) + "\n"


def print_sort_smt(s: Sort) -> str:
    return s.smtlib()
