"""Grammar membership and size-ordered enumeration of grammar terms."""

from __future__ import annotations

import itertools
import time
from typing import Iterator, Mapping, Sequence

from .semantics import Env, EvalError, eval_term, literal_value
from .sorts import BOOL, INT, STRING, Sort
from .terms import (
    Apply,
    ConstantOfSort,
    FunDef,
    Grammar,
    Let,
    Literal,
    NonterminalRef,
    Production,
    Term,
    Var,
    VariableOfSort,
    iter_subterms,
    mk_int,
)
from .theory import logic_theories


# ---------------------------------------------------------------------------
# default grammars


def _nt_name(s: Sort) -> str:
    if s.is_bv:
        return f"StartBV{s.width}"
    return f"Start{s.kind}"


def default_grammar(logic: str, params: Sequence[tuple[str, Sort]], ret: Sort) -> Grammar:
    """Grammar used when a synth-fun omits one: the logic's operators over the
    parameters, with Int literals 0/1 and arbitrary constants of each sort."""
    theories = logic_theories(logic)
    sorts: list[Sort] = [ret]
    for s in [BOOL] + [s for _, s in params]:
        if s not in sorts:
            sorts.append(s)
    if ("S" in theories or STRING in sorts) and INT not in sorts:
        sorts.append(INT)
    if "S" in theories and STRING not in sorts and ret == STRING:
        sorts.append(STRING)
    names = {s: ("Start" if s == ret else _nt_name(s)) for s in sorts}
    N = {s: NonterminalRef(names[s]) for s in sorts}
    B = N[BOOL]

    def app(op, *args):
        return Apply(op, tuple(args))

    prods = []
    for s in sorts:
        alts: list[Term] = [Var(n) for n, ps in params if ps == s]
        if s == BOOL:
            alts += [Literal(True, BOOL), Literal(False, BOOL)]
            alts += [app("not", B), app("and", B, B), app("or", B, B), app("=>", B, B)]
            if INT in N:
                I = N[INT]
                alts += [app(op, I, I) for op in ("=", "<=", "<", ">=", ">")]
            for bs in sorts:
                if bs.is_bv:
                    V = N[bs]
                    alts += [app(op, V, V) for op in ("=", "bvult", "bvule", "bvslt", "bvsle")]
            if STRING in N:
                S = N[STRING]
                alts += [app(op, S, S) for op in ("=", "str.prefixof", "str.suffixof", "str.contains")]
        elif s == INT:
            I = N[INT]
            alts += [Literal(0, INT), Literal(1, INT), ConstantOfSort(INT)]
            alts += [app("+", I, I), app("-", I, I), app("*", ConstantOfSort(INT), I),
                     app("div", I, ConstantOfSort(INT)), app("mod", I, ConstantOfSort(INT)),
                     app("ite", B, I, I)]
            if STRING in N:
                S = N[STRING]
                alts += [app("str.len", S), app("str.indexof", S, S, I), app("str.to.int", S)]
        elif s.is_bv:
            V = N[s]
            alts += [ConstantOfSort(s)]
            alts += [app(op, V) for op in ("bvnot", "bvneg")]
            alts += [app(op, V, V) for op in (
                "bvand", "bvor", "bvxor", "bvadd", "bvsub", "bvmul", "bvudiv", "bvurem",
                "bvshl", "bvlshr", "bvashr")]
            alts += [app("ite", B, V, V)]
        elif s == STRING:
            S = N[STRING]
            I = N[INT]
            alts += [ConstantOfSort(STRING)]
            alts += [app("str.++", S, S), app("str.at", S, I), app("str.substr", S, I, I),
                     app("str.replace", S, S, S), app("int.to.str", I), app("ite", B, S, S)]
        prods.append(Production(names[s], s, tuple(dict.fromkeys(alts))))
    return Grammar("Start", tuple(prods))


# ---------------------------------------------------------------------------
# membership


def _unit_closure(g: Grammar) -> dict[str, list[Term]]:
    """For each nonterminal, its non-unit alternatives reachable through unit
    productions, in production order (depth-first)."""
    out: dict[str, list[Term]] = {}
    for p in g.productions:
        seen = {p.nonterminal}
        alts: list[Term] = []

        def visit(name: str):
            for alt in g.production(name).alternatives:
                if isinstance(alt, NonterminalRef):
                    if alt.name not in seen:
                        seen.add(alt.name)
                        visit(alt.name)
                elif alt not in alts:
                    alts.append(alt)

        visit(p.nonterminal)
        out[p.nonterminal] = alts
    return out


class _Matcher:
    def __init__(self, g: Grammar, params: Mapping[str, Sort]):
        self.alts = _unit_closure(g)
        self.params = params
        # DerivationTable: (nonterminal, id(term)) -> bool, local to one query
        self.memo: dict[tuple[str, int], bool] = {}
        self.keep: list[Term] = []

    def nt(self, name: str, t: Term) -> bool:
        key = (name, id(t))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.keep.append(t)
        result = any(self.match(alt, t) for alt in self.alts[name])
        self.memo[key] = result
        return result

    def match(self, skel: Term, t: Term) -> bool:
        if isinstance(skel, NonterminalRef):
            return self.nt(skel.name, t)
        if isinstance(skel, ConstantOfSort):
            return is_constant(t, skel.sort)
        if isinstance(skel, VariableOfSort):
            return isinstance(t, Var) and self.params.get(t.name) == skel.sort
        if isinstance(skel, (Literal, Var)):
            return skel == t
        if isinstance(skel, Apply):
            return (
                isinstance(t, Apply)
                and t.op == skel.op
                and len(t.args) == len(skel.args)
                and all(self.match(s, a) for s, a in zip(skel.args, t.args))
            )
        if isinstance(skel, Let):
            return (
                isinstance(t, Let)
                and len(t.bindings) == len(skel.bindings)
                and all(sn == tn for (sn, _), (tn, _) in zip(skel.bindings, t.bindings))
                and all(self.match(sb, tb) for (_, sb), (_, tb) in zip(skel.bindings, t.bindings))
                and self.match(skel.body, t.body)
            )
        return False


def is_constant(t: Term, s: Sort) -> bool:
    """Literal of sort ``s``; negative integers written ``(- k)`` count as constants."""
    if isinstance(t, Literal):
        return t.sort == s
    return (
        s == INT
        and isinstance(t, Apply)
        and t.op == "-"
        and len(t.args) == 1
        and isinstance(t.args[0], Literal)
        and t.args[0].sort == INT
        and t.args[0].value > 0
    )


def derives(g: Grammar, t: Term, params: Mapping[str, Sort] | Sequence[tuple[str, Sort]] | None = None,
            nonterminal: str | None = None) -> bool:
    """True iff ``t`` is derivable from the grammar's start symbol.

    ``params`` (name -> sort) is the set of variables that ``(Variable S)``
    leaves may produce; when omitted it is read off the grammar's own
    variable alternatives.
    """
    if params is None:
        params = grammar_params(g)
    elif not isinstance(params, Mapping):
        params = dict(params)
    return _Matcher(g, params).nt(nonterminal or g.start, t)


def grammar_params(g: Grammar) -> dict[str, Sort]:
    out: dict[str, Sort] = {}
    for p in g.productions:
        for alt in p.alternatives:
            if isinstance(alt, Var):
                out[alt.name] = p.sort
    return out


def first_underivable(g: Grammar, t: Term, params=None) -> Term | None:
    """A subterm responsible for rejection, for error messages: the last one in
    preorder that no nonterminal derives, which is a deepest such node."""
    if derives(g, t, params):
        return None
    if params is None:
        params = grammar_params(g)
    m = _Matcher(g, dict(params))
    worst = t
    for sub in iter_subterms(t):
        if not any(m.nt(p.nonterminal, sub) for p in g.productions):
            worst = sub
    return worst


# ---------------------------------------------------------------------------
# enumeration

CONSTANT_POOL_INT = (-1, 0, 1, 2)
CONSTANT_POOL_STR = ("", "a")


def constant_pool(s: Sort) -> list[Term]:
    from .terms import mk_bv, mk_str

    if s == INT:
        return [mk_int(v) for v in CONSTANT_POOL_INT]
    if s == BOOL:
        return [Literal(False, BOOL), Literal(True, BOOL)]
    if s == STRING:
        return [mk_str(v) for v in CONSTANT_POOL_STR]
    w = s.width
    return list(dict.fromkeys([mk_bv(0, w), mk_bv(1, w), mk_bv((1 << w) - 1, w)]))


def _holes(skel: Term) -> list[Term]:
    """Placeholder leaves of a skeleton, left to right."""
    out: list[Term] = []

    def walk(t: Term):
        if isinstance(t, (NonterminalRef, ConstantOfSort, VariableOfSort)):
            out.append(t)
        elif isinstance(t, Apply):
            for a in t.args:
                walk(a)
        elif isinstance(t, Let):
            for _, b in t.bindings:
                walk(b)
            walk(t.body)

    walk(skel)
    return out


def _plug(skel: Term, fillers: Iterator[Term]) -> Term:
    if isinstance(skel, (NonterminalRef, ConstantOfSort, VariableOfSort)):
        return next(fillers)
    if isinstance(skel, Apply):
        if not skel.args:
            return skel
        return Apply(skel.op, tuple(_plug(a, fillers) for a in skel.args))
    if isinstance(skel, Let):
        bindings = tuple((n, _plug(b, fillers)) for n, b in skel.bindings)
        return Let(bindings, _plug(skel.body, fillers))
    return skel


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Ordered tuples of ``parts`` positive ints summing to ``total``, lexicographic."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class Enumerator:
    """Bottom-up, size-ordered term generator (the EnumState).

    ``cells[nt][size]`` holds the distinct terms of exactly that size derivable
    from ``nt``. When ``points`` are given, terms whose value vector over the
    points repeats one already kept for the same nonterminal are dropped
    (observational equivalence); the kept representative is the first one
    generated.
    """

    def __init__(self, g: Grammar, params: Mapping[str, Sort] | Sequence[tuple[str, Sort]] | None = None,
                 points: Sequence[Env] | None = None, funs: Mapping[str, FunDef] | None = None):
        self.grammar = g
        if params is None:
            params = grammar_params(g)
        self.params = dict(params)
        self.alts = _unit_closure(g)
        self.points = list(points) if points else []
        self.funs = funs
        self.observe = bool(self.points) and not any(
            isinstance(s, Let) for p in g.productions for a in p.alternatives for s in iter_subterms(a)
        )
        self.cells: dict[str, list[list[Term]]] = {p.nonterminal: [[]] for p in g.productions}
        self.vectors: dict[Term, tuple] = {}
        self.seen_vectors: dict[str, set] = {p.nonterminal: set() for p in g.productions}
        self.size = 0
        self._compiled = {
            nt: [(alt, _holes(alt), alt.size) for alt in alts] for nt, alts in self.alts.items()
        }
        self._leaf_cache: dict[Term, list[list[Term]]] = {}
        self._skeletons: dict[Term, tuple] = {}
        self.deadline: float | None = None  # time.monotonic() value; grow() raises TimeoutError past it

    def _leaf_terms(self, hole: Term, size: int) -> list[Term]:
        if isinstance(hole, NonterminalRef):
            cells = self.cells[hole.name]
            return cells[size] if size < len(cells) else []
        table = self._leaf_cache.get(hole)
        if table is None:
            if isinstance(hole, ConstantOfSort):
                pool = constant_pool(hole.sort)
            else:
                pool = [Var(n) for n, s in self.params.items() if s == hole.sort]
            table = [[] for _ in range(3)]
            for t in pool:
                table[t.size].append(t)
            self._leaf_cache[hole] = table
        return table[size] if size < len(table) else []

    def _vector(self, t: Term) -> tuple | None:
        v = self.vectors.get(t)
        if v is not None:
            return v
        try:
            v = tuple(eval_term(t, p, self.funs) for p in self.points)
        except EvalError:
            return None
        # type tag keeps True and 1 apart in mixed-sort caches
        v = tuple((type(x), x) for x in v)
        self.vectors[t] = v
        return v

    def _fast_vector(self, skel: Term, fillers: Sequence[Term]) -> tuple | None:
        """Value vector of ``skel`` plugged with ``fillers``, from the fillers' vectors."""
        vecs = [self._vector(f) for f in fillers]
        if any(v is None for v in vecs):
            return None
        plugged, names = self._hole_skeleton(skel, len(fillers))
        out = []
        for k, p in enumerate(self.points):
            env = dict(p)
            for n, vec in zip(names, vecs):
                env[n] = vec[k][1]
            try:
                x = eval_term(plugged, env, self.funs)
            except EvalError:
                return None
            out.append((type(x), x))
        return tuple(out)

    def _hole_skeleton(self, skel: Term, n: int):
        hit = self._skeletons.get(skel)
        if hit is None:
            names = [f"h'{i}" for i in range(n)]
            hit = (_plug(skel, iter(Var(x) for x in names)), names)
            self._skeletons[skel] = hit
        return hit

    def grow(self) -> None:
        """Compute the cells of the next size for every nonterminal."""
        s = self.size + 1
        new: dict[str, list[Term]] = {}
        ticks = 0
        for nt, compiled in self._compiled.items():
            cell: list[Term] = []
            members: set[Term] = set()
            seen_vec = self.seen_vectors[nt]
            for skel, holes, fixed in compiled:
                budget = s - fixed
                if budget < len(holes) or (not holes and budget != 0):
                    continue
                if not holes:
                    candidates = [(skel, ())]
                else:
                    candidates = self._fill(skel, holes, budget)
                for t, fillers in candidates:
                    ticks += 1
                    if self.deadline is not None and ticks % 1024 == 0 and time.monotonic() > self.deadline:
                        raise TimeoutError("enumeration deadline passed")
                    if t in members:
                        continue
                    if self.observe:
                        vec = self._fast_vector(skel, fillers) if holes else self._vector(t)
                        if vec is not None:
                            if vec in seen_vec:
                                continue
                            seen_vec.add(vec)
                            self.vectors[t] = vec
                    members.add(t)
                    cell.append(t)
            new[nt] = cell
        for nt, cell in new.items():
            self.cells[nt].append(cell)
        self.size = s

    def _fill(self, skel: Term, holes: list[Term], budget: int):
        for sizes in _compositions(budget, len(holes)):
            pools = [self._leaf_terms(h, k) for h, k in zip(holes, sizes)]
            if any(not p for p in pools):
                continue
            for combo in itertools.product(*pools):
                yield _plug(skel, iter(combo)), combo

    def terms_of_size(self, size: int, nonterminal: str | None = None) -> list[Term]:
        while self.size < size:
            self.grow()
        return self.cells[nonterminal or self.grammar.start][size]

    def stream(self, max_size: int, nonterminal: str | None = None) -> Iterator[Term]:
        for s in range(1, max_size + 1):
            yield from self.terms_of_size(s, nonterminal)


def enumerate_terms(g: Grammar, max_size: int, params=None) -> Iterator[Term]:
    """All terms derivable from the start symbol with size <= max_size, by size."""
    if max_size < 1:
        raise ValueError("max_size must be positive")
    return Enumerator(g, params).stream(max_size)


def enumerate_distinct(g: Grammar, max_size: int, points: Sequence[Env], params=None,
                       funs: Mapping[str, FunDef] | None = None) -> Iterator[Term]:
    """Like enumerate_terms, but yields at most one term per value vector on ``points``."""
    if max_size < 1:
        raise ValueError("max_size must be positive")
    return Enumerator(g, params, points, funs).stream(max_size)
