"""Sorted term language shared by every other module.

Terms are immutable and hashable; hashes and sizes are cached at
construction so terms can be used as dictionary keys in the enumerator
and the derivability memo.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .sorts import BOOL, INT, STRING, Sort, SortError, bv
from .theory import result_sort

# Identifiers containing this character cannot come from source text; the
# parser rejects them, so fresh names built with it never clash.
FRESH_MARK = "'"
_fresh_counter = itertools.count(1)


class SubstitutionError(Exception):
    pass


class Term:
    """Base class for term nodes. Use the concrete subclasses."""

    __slots__ = ()

    @property
    def size(self) -> int:  # pragma: no cover - overridden
        raise NotImplementedError

    def __str__(self) -> str:
        from .printer import print_term

        return print_term(self)


@dataclass(frozen=True, slots=True, eq=False)
class Literal(Term):
    value: object
    sort: Sort
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = self.value
        s = self.sort
        if s == BOOL:
            ok = isinstance(v, bool)
        elif s == INT:
            # negative numbers are written (- k), never as a literal
            ok = isinstance(v, int) and not isinstance(v, bool) and v >= 0
        elif s.is_bv:
            ok = isinstance(v, int) and not isinstance(v, bool) and 0 <= v < (1 << s.width)
        else:
            ok = isinstance(v, str)
        if not ok:
            raise ValueError(f"bad literal {v!r} for sort {s}")
        object.__setattr__(self, "_hash", hash(("lit", type(v), v, s)))

    def __eq__(self, other):
        return (
            isinstance(other, Literal)
            and self._hash == other._hash
            and self.sort == other.sort
            and type(self.value) is type(other.value)
            and self.value == other.value
        )

    def __hash__(self):
        return self._hash

    @property
    def size(self) -> int:
        return 1


@dataclass(frozen=True, slots=True, eq=False)
class Var(Term):
    name: str
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("var", self.name)))

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name

    def __hash__(self):
        return self._hash

    @property
    def size(self) -> int:
        return 1


@dataclass(frozen=True, slots=True, eq=False)
class Apply(Term):
    op: str
    args: tuple[Term, ...] = ()
    _hash: int = field(init=False, repr=False, compare=False)
    _size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "_hash", hash(("app", self.op, self.args)))
        object.__setattr__(self, "_size", 1 + sum(a.size for a in self.args))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Apply)
            and self._hash == other._hash
            and self.op == other.op
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    @property
    def size(self) -> int:
        return self._size


@dataclass(frozen=True, slots=True, eq=False)
class Let(Term):
    bindings: tuple[tuple[str, Term], ...]
    body: Term
    _hash: int = field(init=False, repr=False, compare=False)
    _size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.bindings, tuple):
            object.__setattr__(self, "bindings", tuple((n, t) for n, t in self.bindings))
        names = [n for n, _ in self.bindings]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate let binding in {names}")
        object.__setattr__(self, "_hash", hash(("let", self.bindings, self.body)))
        object.__setattr__(
            self, "_size", 1 + sum(t.size for _, t in self.bindings) + self.body.size
        )

    def __eq__(self, other):
        return (
            isinstance(other, Let)
            and self._hash == other._hash
            and self.bindings == other.bindings
            and self.body == other.body
        )

    def __hash__(self):
        return self._hash

    @property
    def size(self) -> int:
        return self._size


# Grammar skeleton leaves. They only appear inside Production alternatives.


@dataclass(frozen=True, slots=True)
class NonterminalRef(Term):
    name: str

    @property
    def size(self) -> int:
        return 0


@dataclass(frozen=True, slots=True)
class ConstantOfSort(Term):
    sort: Sort

    @property
    def size(self) -> int:
        return 0


@dataclass(frozen=True, slots=True)
class VariableOfSort(Term):
    sort: Sort

    @property
    def size(self) -> int:
        return 0


HOLE_TYPES = (NonterminalRef, ConstantOfSort, VariableOfSort)


def term_size(t: Term) -> int:
    """Number of nodes in the parse tree of ``t``."""
    return t.size


def mk_int(n: int) -> Term:
    """Integer constant term; negative values become ``(- k)``."""
    if n < 0:
        return Apply("-", (Literal(-n, INT),))
    return Literal(n, INT)


def mk_bool(b: bool) -> Literal:
    return Literal(bool(b), BOOL)


def mk_bv(value: int, width: int) -> Literal:
    return Literal(value % (1 << width), bv(width))


def mk_str(s: str) -> Literal:
    return Literal(s, STRING)


def ite(c: Term, a: Term, b: Term) -> Apply:
    return Apply("ite", (c, a, b))


# ---------------------------------------------------------------------------
# Problem representation


@dataclass(frozen=True)
class Production:
    nonterminal: str
    sort: Sort
    alternatives: tuple[Term, ...]


@dataclass(frozen=True)
class Grammar:
    start: str
    productions: tuple[Production, ...]

    def __post_init__(self):
        names = [p.nonterminal for p in self.productions]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate nonterminal in {names}")
        if not self.productions or self.productions[0].nonterminal != self.start:
            raise ValueError("start must be the first production's nonterminal")
        for p in self.productions:
            for alt in p.alternatives:
                for leaf in iter_subterms(alt):
                    if isinstance(leaf, NonterminalRef) and leaf.name not in names:
                        raise ValueError(f"undefined nonterminal {leaf.name}")

    def production(self, name: str) -> Production:
        for p in self.productions:
            if p.nonterminal == name:
                return p
        raise KeyError(name)

    @property
    def start_sort(self) -> Sort:
        return self.productions[0].sort

    def with_start(self, name: str) -> "Grammar":
        """Same productions, rooted at ``name``."""
        first = self.production(name)
        rest = tuple(p for p in self.productions if p.nonterminal != name)
        return Grammar(name, (first,) + rest)


@dataclass(frozen=True)
class FunDef:
    name: str
    params: tuple[tuple[str, Sort], ...]
    return_sort: Sort
    body: Term

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.params)


@dataclass(frozen=True)
class SynthFun:
    name: str
    params: tuple[tuple[str, Sort], ...]
    return_sort: Sort
    grammar: Grammar | None = None

    def __post_init__(self):
        names = [n for n, _ in self.params]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter in synth-fun {self.name}")
        if self.grammar is not None and self.grammar.start_sort != self.return_sort:
            raise ValueError(
                f"grammar start sort {self.grammar.start_sort} differs from "
                f"return sort {self.return_sort} of {self.name}"
            )


@dataclass(frozen=True)
class InvConstraint:
    inv: str
    pre: str
    trans: str
    post: str


@dataclass(frozen=True)
class Problem:
    logic: str
    vars: tuple[tuple[str, Sort], ...] = ()
    primed_vars: tuple[tuple[str, Sort], ...] = ()
    defined_funs: tuple[FunDef, ...] = ()
    synth_funs: tuple[SynthFun, ...] = ()
    constraints: tuple[Term, ...] = ()
    inv_constraints: tuple[InvConstraint, ...] = ()
    kind: str = "General"  # or "Invariant"

    def synth_fun(self, name: str) -> SynthFun:
        for sf in self.synth_funs:
            if sf.name == name:
                return sf
        raise KeyError(name)

    @property
    def all_vars(self) -> tuple[tuple[str, Sort], ...]:
        return self.vars + self.primed_vars

    def var_env(self) -> dict[str, Sort]:
        return dict(self.all_vars)

    def signatures(self) -> dict[str, tuple[tuple[Sort, ...], Sort]]:
        sigs = {f.name: (tuple(s for _, s in f.params), f.return_sort) for f in self.defined_funs}
        for sf in self.synth_funs:
            sigs[sf.name] = (tuple(s for _, s in sf.params), sf.return_sort)
        return sigs

    def fun_table(self) -> dict[str, FunDef]:
        return {f.name: f for f in self.defined_funs}


@dataclass(frozen=True)
class Candidate:
    target: str
    params: tuple[tuple[str, Sort], ...]
    return_sort: Sort
    body: Term

    def as_fundef(self) -> FunDef:
        return FunDef(self.target, self.params, self.return_sort, self.body)

    def define_fun(self) -> str:
        from .printer import print_define_fun

        return print_define_fun(self.as_fundef())


# ---------------------------------------------------------------------------
# Traversals


def iter_subterms(t: Term) -> Iterable[Term]:
    stack = [t]
    while stack:
        cur = stack.pop()
        yield cur
        if isinstance(cur, Apply):
            stack.extend(reversed(cur.args))
        elif isinstance(cur, Let):
            stack.append(cur.body)
            stack.extend(reversed([b for _, b in cur.bindings]))


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Apply):
        out: frozenset[str] = frozenset()
        for a in t.args:
            out |= free_vars(a)
        return out
    if isinstance(t, Let):
        out = frozenset()
        for _, b in t.bindings:
            out |= free_vars(b)
        return out | (free_vars(t.body) - {n for n, _ in t.bindings})
    return frozenset()


def applications_of(t: Term, name: str) -> list[Apply]:
    return [s for s in iter_subterms(t) if isinstance(s, Apply) and s.op == name]


def mentions(t: Term, name: str) -> bool:
    return any(isinstance(s, Apply) and s.op == name for s in iter_subterms(t))


def fresh_name(base: str) -> str:
    base = base.split(FRESH_MARK, 1)[0]
    return f"{base}{FRESH_MARK}{next(_fresh_counter)}"


def rename_free(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Capture-avoiding simultaneous substitution of terms for free variables."""
    if not mapping:
        return t
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Apply):
        if not t.args:
            return t
        new = tuple(rename_free(a, mapping) for a in t.args)
        return t if new == t.args else Apply(t.op, new)
    if isinstance(t, Let):
        bindings = tuple((n, rename_free(b, mapping)) for n, b in t.bindings)
        bound = {n for n, _ in t.bindings}
        inner = {k: v for k, v in mapping.items() if k not in bound}
        incoming: frozenset[str] = frozenset()
        for v in inner.values():
            incoming |= free_vars(v)
        renames: dict[str, Term] = {}
        new_bindings = []
        for n, b in bindings:
            if n in incoming:
                fresh = fresh_name(n)
                renames[n] = Var(fresh)
                new_bindings.append((fresh, b))
            else:
                new_bindings.append((n, b))
        body = rename_free(t.body, {**inner, **renames})
        return Let(tuple(new_bindings), body)
    return t


def inline_calls(t: Term, defs: Mapping[str, FunDef], env: Mapping[str, Sort] | None = None,
                 sigs: Mapping[str, tuple[tuple[Sort, ...], Sort]] | None = None) -> Term:
    """Replace every application of a function in ``defs`` by its body."""
    if isinstance(t, Apply):
        args = tuple(inline_calls(a, defs, env, sigs) for a in t.args)
        fd = defs.get(t.op)
        if fd is None:
            return t if args == t.args else Apply(t.op, args)
        if len(args) != len(fd.params):
            raise SubstitutionError(
                f"{t.op} applied to {len(args)} arguments, expects {len(fd.params)}"
            )
        if env is not None:
            for (pname, psort), a in zip(fd.params, args):
                got = well_sorted(a, env, sigs)
                if got != psort:
                    raise SubstitutionError(
                        f"argument for {pname} of {t.op} has sort {got}, expected {psort}"
                    )
        return rename_free(fd.body, dict(zip(fd.param_names, args)))
    if isinstance(t, Let):
        return Let(
            tuple((n, inline_calls(b, defs, env, sigs)) for n, b in t.bindings),
            inline_calls(t.body, defs, None, sigs),
        )
    return t


def substitute(phi: Term, candidate: Candidate, env: Mapping[str, Sort] | None = None,
               sigs: Mapping[str, tuple[tuple[Sort, ...], Sort]] | None = None) -> Term:
    """phi with every call of ``candidate.target`` replaced by the candidate body.

    When ``env`` is given, argument sorts are checked against the candidate's
    parameter sorts.
    """
    return inline_calls(phi, {candidate.target: candidate.as_fundef()}, env, sigs)


def substitute_all(phi: Term, candidates: Sequence[Candidate]) -> Term:
    return inline_calls(phi, {c.target: c.as_fundef() for c in candidates})


# ---------------------------------------------------------------------------
# Sort checking

Signatures = Mapping[str, tuple[tuple[Sort, ...], Sort]]


def well_sorted(t: Term, env: Mapping[str, Sort], sigs: Signatures | None = None) -> Sort:
    """Sort of ``t`` under ``env``; raises SortError naming the bad subterm."""
    if isinstance(t, Literal):
        return t.sort
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise SortError(f"unknown symbol {t.name}", t) from None
    if isinstance(t, Apply):
        arg_sorts = [well_sorted(a, env, sigs) for a in t.args]
        if sigs is not None and t.op in sigs:
            params, ret = sigs[t.op]
            if len(params) != len(arg_sorts):
                raise SortError(
                    f"{t.op} expects {len(params)} arguments, got {len(arg_sorts)} in {t}", t
                )
            for i, (want, got) in enumerate(zip(params, arg_sorts)):
                if want != got:
                    raise SortError(
                        f"argument {i + 1} of {t.op} has sort {got}, expected {want} in {t}", t
                    )
            return ret
        try:
            return result_sort(t.op, arg_sorts)
        except SortError as e:
            raise SortError(f"{e} in {t}", t) from None
    if isinstance(t, Let):
        inner = dict(env)
        for n, b in t.bindings:
            inner[n] = well_sorted(b, env, sigs)
        return well_sorted(t.body, inner, sigs)
    raise SortError(f"grammar placeholder {t!r} is not a term", t)
