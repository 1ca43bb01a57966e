"""Reader for SyGuS-IF v1 problems and solver outputs."""

from __future__ import annotations

import logging
from typing import Mapping

from .sexpr import Atom, ParseError, SExpr, SList, SourceSpan, read_sexpr, read_sexprs
from .sorts import BOOL, INT, STRING, Sort, SortError, bv
from .terms import (
    Apply,
    Candidate,
    ConstantOfSort,
    FunDef,
    Grammar,
    InvConstraint,
    Let,
    Literal,
    NonterminalRef,
    Problem,
    Production,
    SynthFun,
    Term,
    Var,
    VariableOfSort,
    rename_free,
    well_sorted,
)

log = logging.getLogger(__name__)

__all__ = [
    "ParseError",
    "parse_problem",
    "parse_candidate",
    "parse_term",
    "parse_sort",
]

_UNSUPPORTED_LEAVES = ("InputVariable", "LocalVariable")
_UNSUPPORTED_COMMANDS = ("set-feature", "chc-constraint", "oracle-constraint", "declare-oracle-fun",
                         "synth-fun-v2", "declare-datatype", "declare-datatypes", "define-sort")


def _span(e: SExpr) -> SourceSpan | None:
    return e.span


def _fail(msg: str, e: SExpr | None) -> ParseError:
    return ParseError(msg, e.span if e is not None else None)


def _symbol(e: SExpr, what: str) -> str:
    if not isinstance(e, Atom) or e.kind != "symbol":
        raise _fail(f"expected {what}, got {e}", e)
    return e.text


def parse_sort(e: SExpr) -> Sort:
    if isinstance(e, Atom):
        if e.kind == "symbol" and e.text in ("Int", "Bool", "String"):
            return {"Int": INT, "Bool": BOOL, "String": STRING}[e.text]
        raise _fail(f"unsupported sort {e.text}", e)
    items = e.items
    # (BitVec n) in SyGuS-IF v1, (_ BitVec n) in SMT-LIB
    if len(items) == 2 and isinstance(items[0], Atom) and items[0].text == "BitVec":
        width = items[1]
    elif len(items) == 3 and isinstance(items[0], Atom) and items[0].text == "_" \
            and isinstance(items[1], Atom) and items[1].text == "BitVec":
        width = items[2]
    else:
        raise _fail(f"unsupported sort {_show(e)}", e)
    if not isinstance(width, Atom) or width.kind != "numeral" or int(width.text) < 1:
        raise _fail("bit-vector width must be a positive numeral", width)
    return bv(int(width.text))


def _show(e: SExpr) -> str:
    if isinstance(e, Atom):
        return e.text
    return "(" + " ".join(_show(i) for i in e.items) + ")"


class _Ctx:
    """Name resolution while converting s-expressions to terms."""

    def __init__(self, locals_: Mapping[str, Sort] | None = None,
                 nullary_funs: frozenset[str] = frozenset(),
                 nonterminals: Mapping[str, Sort] | None = None,
                 params: frozenset[str] = frozenset()):
        self.locals = dict(locals_ or {})
        self.nullary_funs = nullary_funs
        self.nonterminals = dict(nonterminals or {})
        self.params = params

    def bind(self, names) -> "_Ctx":
        c = _Ctx(self.locals, self.nullary_funs, self.nonterminals, self.params)
        for n in names:
            c.locals[n] = None
        return c


def _literal(a: Atom) -> Term | None:
    if a.kind == "numeral":
        return Literal(int(a.text), INT)
    if a.kind == "binary":
        return Literal(int(a.text[2:], 2), bv(len(a.text) - 2))
    if a.kind == "hex":
        return Literal(int(a.text[2:], 16), bv(4 * (len(a.text) - 2)))
    if a.kind == "string":
        return Literal(a.text, STRING)
    if a.kind == "symbol" and a.text in ("true", "false"):
        return Literal(a.text == "true", BOOL)
    return None


def to_term(e: SExpr, ctx: _Ctx | None = None) -> Term:
    """Convert an s-expression to a term (or grammar skeleton when ctx has nonterminals)."""
    ctx = ctx or _Ctx()
    if isinstance(e, Atom):
        if e.kind == "symbol":
            name = e.text
            if name in ctx.locals:
                return Var(name)
            if name in ctx.nonterminals:
                return NonterminalRef(name)
            if name in ctx.params:
                return Var(name)
            if name in ctx.nullary_funs:
                return Apply(name, ())
        lit = _literal(e)
        if lit is not None:
            return lit
        if e.kind == "symbol":
            return Var(e.text)
        raise _fail(f"unsupported literal {e.text}", e)
    if not e.items:
        raise _fail("empty application", e)
    head = e.items[0]
    if isinstance(head, SList):
        if head.head() == "_":
            raise _fail(f"unsupported feature: indexed operator {_show(head)}", head)
        raise _fail("application head must be a symbol", head)
    op = head.text
    if head.kind != "symbol":
        raise _fail(f"cannot apply {op}", head)
    if op == "_":
        return _indexed_literal(e)
    if op == "let":
        return _let(e, ctx)
    if op in ("Constant", "Variable") + _UNSUPPORTED_LEAVES and ctx.nonterminals:
        if op in _UNSUPPORTED_LEAVES:
            raise _fail(f"unsupported feature: ({op} ...) grammar leaf", e)
        if len(e.items) != 2:
            raise _fail(f"({op} S) takes one sort", e)
        s = parse_sort(e.items[1])
        return ConstantOfSort(s) if op == "Constant" else VariableOfSort(s)
    if op in ("forall", "exists"):
        raise _fail("unsupported feature: quantifiers", e)
    return Apply(op, tuple(to_term(a, ctx) for a in e.items[1:]))


def _indexed_literal(e: SList) -> Term:
    # (_ bvN w)
    if len(e.items) == 3 and isinstance(e.items[1], Atom) and e.items[1].text.startswith("bv") \
            and e.items[1].text[2:].isdigit() and isinstance(e.items[2], Atom) \
            and e.items[2].kind == "numeral":
        width = int(e.items[2].text)
        value = int(e.items[1].text[2:])
        if width < 1 or value >= (1 << width):
            raise _fail("bit-vector literal out of range", e)
        return Literal(value, bv(width))
    raise _fail(f"unsupported feature: indexed identifier {_show(e)}", e)


def _let(e: SList, ctx: _Ctx) -> Term:
    if len(e.items) != 3 or not isinstance(e.items[1], SList):
        raise _fail("malformed let", e)
    bindings = []
    seen = set()
    for b in e.items[1].items:
        # (name term) or, in SyGuS-IF v1, (name sort term)
        if not isinstance(b, SList) or len(b.items) not in (2, 3):
            raise _fail("malformed let binding", b)
        name = _symbol(b.items[0], "binding name")
        if name in seen:
            raise _fail(f"duplicate let binding {name}", b)
        seen.add(name)
        bindings.append((name, to_term(b.items[-1], ctx)))
    body = to_term(e.items[2], ctx.bind(seen))
    return Let(tuple(bindings), body)


def parse_term(text: str) -> Term:
    """Parse a single term without a declaration context (symbols become variables)."""
    return to_term(read_sexpr(text))


# ---------------------------------------------------------------------------
# problems


def _params(e: SExpr) -> tuple[tuple[str, Sort], ...]:
    if not isinstance(e, SList):
        raise _fail("expected a parameter list", e)
    out = []
    for p in e.items:
        if not isinstance(p, SList) or len(p.items) != 2:
            raise _fail("malformed parameter", p)
        out.append((_symbol(p.items[0], "parameter name"), parse_sort(p.items[1])))
    names = [n for n, _ in out]
    if len(set(names)) != len(names):
        raise _fail("duplicate parameter names", e)
    return tuple(out)


def skeleton_sort(alt: Term, nt_sorts: Mapping[str, Sort], env: Mapping[str, Sort],
                  sigs=None) -> Sort:
    """Sort of a grammar alternative, treating placeholders by their declared sort."""
    holes: dict[str, Sort] = {}

    def plug(t: Term) -> Term:
        if isinstance(t, NonterminalRef):
            name = f"nt'{t.name}"
            holes[name] = nt_sorts[t.name]
            return Var(name)
        if isinstance(t, (ConstantOfSort, VariableOfSort)):
            name = f"hole'{t.sort}"
            holes[name] = t.sort
            return Var(name)
        if isinstance(t, Apply):
            return Apply(t.op, tuple(plug(a) for a in t.args))
        if isinstance(t, Let):
            return Let(tuple((n, plug(b)) for n, b in t.bindings), plug(t.body))
        return t

    plugged = plug(alt)
    return well_sorted(plugged, {**env, **holes}, sigs)


def _grammar(e: SExpr, params, ret: Sort, sigs, nullary: frozenset[str]) -> Grammar:
    if not isinstance(e, SList) or not e.items:
        raise _fail("expected a grammar", e)
    nt_sorts: dict[str, Sort] = {}
    raw = []
    for rule in e.items:
        if not isinstance(rule, SList) or len(rule.items) != 3 or not isinstance(rule.items[2], SList):
            raise _fail("malformed production", rule)
        name = _symbol(rule.items[0], "nonterminal name")
        if name in nt_sorts:
            raise _fail(f"duplicate nonterminal {name}", rule)
        nt_sorts[name] = parse_sort(rule.items[1])
        raw.append((name, rule))
    ctx = _Ctx(nullary_funs=nullary, nonterminals=nt_sorts, params=frozenset(n for n, _ in params))
    env = dict(params)
    prods = []
    for name, rule in raw:
        alts = []
        for a in rule.items[2].items:
            t = to_term(a, ctx)
            try:
                s = skeleton_sort(t, nt_sorts, env, sigs)
            except SortError as err:
                raise _fail(f"ill-sorted grammar alternative: {err}", a) from None
            if s != nt_sorts[name]:
                raise _fail(f"alternative {_show(a)} has sort {s}, nonterminal {name} is {nt_sorts[name]}", a)
            if t not in alts:
                alts.append(t)
        prods.append(Production(name, nt_sorts[name], tuple(alts)))
    if prods[0].sort != ret:
        raise _fail(f"grammar start sort {prods[0].sort} differs from return sort {ret}", e)
    return Grammar(prods[0].nonterminal, tuple(prods))


def parse_problem(text: str) -> Problem:
    """Parse SyGuS-IF v1 text into a Problem."""
    from .grammar import default_grammar

    cmds = read_sexprs(text)
    logic = None
    vars_: list[tuple[str, Sort]] = []
    primed: list[tuple[str, Sort]] = []
    defs: list[FunDef] = []
    synth: list[SynthFun] = []
    constraints: list[tuple[Term, SExpr]] = []
    invs: list[tuple[InvConstraint, SExpr]] = []
    names: set[str] = set()
    check_synth = None
    kind = "General"
    pending_grammars = []

    def declare(name: str, e: SExpr):
        if name in names:
            raise _fail(f"duplicate declaration of {name}", e)
        names.add(name)

    def sigs():
        out = {f.name: (tuple(s for _, s in f.params), f.return_sort) for f in defs}
        for sf in synth:
            out[sf.name] = (tuple(s for _, s in sf.params), sf.return_sort)
        return out

    def nullary():
        return frozenset(f.name for f in defs if not f.params) | frozenset(
            sf.name for sf in synth if not sf.params)

    for cmd in cmds:
        if not isinstance(cmd, SList) or cmd.head() is None:
            raise _fail(f"expected a command, got {_show(cmd)}", cmd)
        if check_synth is not None:
            raise _fail("command after check-synth", cmd)
        head = cmd.head()
        args = cmd.items[1:]
        if head == "set-logic":
            if len(args) != 1:
                raise _fail("set-logic takes one argument", cmd)
            if logic is not None:
                raise _fail("duplicate set-logic", cmd)
            logic = _symbol(args[0], "logic name")
        elif head in ("set-options", "set-option"):
            log.warning("ignoring %s at %s", head, cmd.span)
        elif head in ("declare-var", "declare-primed-var"):
            if len(args) != 2:
                raise _fail(f"{head} takes a name and a sort", cmd)
            name = _symbol(args[0], "variable name")
            s = parse_sort(args[1])
            declare(name, cmd)
            vars_.append((name, s))
            if head == "declare-primed-var":
                declare(name + "!", cmd)
                primed.append((name + "!", s))
        elif head == "define-fun":
            if len(args) != 4:
                raise _fail("define-fun takes a name, parameters, a sort and a body", cmd)
            name = _symbol(args[0], "function name")
            params = _params(args[1])
            ret = parse_sort(args[2])
            body = to_term(args[3], _Ctx({n: s for n, s in params}, nullary()))
            try:
                got = well_sorted(body, dict(params), sigs())
            except SortError as err:
                raise _fail(f"ill-sorted body of {name}: {err}", args[3]) from None
            if got != ret:
                raise _fail(f"body of {name} has sort {got}, declared {ret}", args[3])
            declare(name, cmd)
            defs.append(FunDef(name, params, ret, body))
        elif head in ("synth-fun", "synth-inv"):
            is_inv = head == "synth-inv"
            if is_inv:
                kind = "Invariant"
                if len(args) not in (2, 3):
                    raise _fail("synth-inv takes a name, parameters and an optional grammar", cmd)
                ret = BOOL
                gexpr = args[2] if len(args) == 3 else None
            else:
                if len(args) not in (3, 4):
                    raise _fail("synth-fun takes a name, parameters, a sort and an optional grammar", cmd)
                ret = parse_sort(args[2])
                gexpr = args[3] if len(args) == 4 else None
            name = _symbol(args[0], "function name")
            params = _params(args[1])
            declare(name, cmd)
            sig = sigs()
            if gexpr is not None:
                g = _grammar(gexpr, params, ret, sig, nullary())
            else:
                g = default_grammar(logic or "ALL", params, ret)
            synth.append(SynthFun(name, params, ret, g))
        elif head == "constraint":
            if len(args) != 1:
                raise _fail("constraint takes one term", cmd)
            env_names = {n: s for n, s in vars_ + primed}
            t = to_term(args[0], _Ctx(env_names, nullary()))
            constraints.append((t, args[0]))
        elif head == "inv-constraint":
            if len(args) != 4:
                raise _fail("inv-constraint takes four function names", cmd)
            kind = "Invariant"
            invs.append((InvConstraint(*(_symbol(a, "function name") for a in args)), cmd))
        elif head == "check-synth":
            if args:
                raise _fail("check-synth takes no arguments", cmd)
            check_synth = cmd
        elif head in _UNSUPPORTED_COMMANDS:
            raise _fail(f"unsupported feature: {head}", cmd)
        else:
            raise _fail(f"unknown command {head}", cmd)

    if check_synth is None:
        end = len(text)
        line = text.count("\n") + 1
        col = len(text) - (text.rfind("\n") + 1) + 1
        raise ParseError("missing check-synth", SourceSpan(end, end, line, col, line, col))
    if logic is None:
        log.warning("no set-logic; assuming ALL")
        logic = "ALL"

    env = {n: s for n, s in vars_ + primed}
    final_sigs = sigs()
    for t, e in constraints:
        try:
            s = well_sorted(t, env, final_sigs)
        except SortError as err:
            raise _fail(f"ill-sorted constraint: {err}", e) from None
        if s != BOOL:
            raise _fail(f"constraint has sort {s}, expected Bool", e)

    return Problem(
        logic=logic,
        vars=tuple(vars_),
        primed_vars=tuple(primed),
        defined_funs=tuple(defs),
        synth_funs=tuple(synth),
        constraints=tuple(t for t, _ in constraints),
        inv_constraints=tuple(ic for ic, _ in invs),
        kind=kind,
    )


# ---------------------------------------------------------------------------
# solver output


def parse_candidate(text: str, problem: Problem) -> list[Candidate]:
    """Parse one define-fun per synth-fun from solver output, in problem order."""
    items = read_sexprs(text)
    # CVC4-style output prefixes the definitions with "unsat"
    if items and isinstance(items[0], Atom) and items[0].text == "unsat":
        items = items[1:]
    if len(items) == 1 and isinstance(items[0], SList) and items[0].items \
            and all(isinstance(i, SList) and i.head() == "define-fun" for i in items[0].items):
        items = list(items[0].items)
    if not items:
        raise ParseError("no define-fun in solver output")
    # bodies may call defined functions and (in multi-function problems) other synth-funs
    sigs = problem.signatures()
    nullary = frozenset(n for n, (params, _) in sigs.items() if not params)
    found: dict[str, Candidate] = {}
    for d in items:
        if not isinstance(d, SList) or d.head() != "define-fun":
            raise _fail(f"expected define-fun, got {_show(d)}", d)
        if len(d.items) != 5:
            raise _fail("define-fun takes a name, parameters, a sort and a body", d)
        name = _symbol(d.items[1], "function name")
        try:
            sf = problem.synth_fun(name)
        except KeyError:
            raise _fail(f"unknown synth-fun {name}", d.items[1]) from None
        if name in found:
            raise _fail(f"duplicate definition of {name}", d)
        params = _params(d.items[2])
        ret = parse_sort(d.items[3])
        if [s for _, s in params] != [s for _, s in sf.params] or ret != sf.return_sort:
            raise _fail(f"signature of {name} does not match the synth-fun declaration", d)
        body = to_term(d.items[4], _Ctx(dict(params), nullary))
        try:
            got = well_sorted(body, dict(params), sigs)
        except SortError as err:
            raise _fail(f"ill-sorted body of {name}: {err}", d.items[4]) from None
        if got != ret:
            raise _fail(f"body of {name} has sort {got}, expected {ret}", d.items[4])
        # grammar checks are phrased over the declared parameter names
        renames = {p: Var(q) for (p, _), (q, _) in zip(params, sf.params) if p != q}
        if renames:
            body = rename_free(body, renames)
        found[name] = Candidate(name, sf.params, sf.return_sort, body)
    missing = [sf.name for sf in problem.synth_funs if sf.name not in found]
    if missing:
        raise ParseError(f"missing definition for {', '.join(missing)}")
    return [found[sf.name] for sf in problem.synth_funs]
