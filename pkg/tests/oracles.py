"""Independent reference implementations used to check the library.

Nothing here imports the grammar engine or the size metric: the oracles are
deliberately naive so that agreement means something.
"""

from __future__ import annotations

import itertools
from typing import Iterable

from syguskit.sexpr import Atom, SList, read_sexpr
from syguskit.printer import print_term
from syguskit.sorts import BOOL, INT, STRING, Sort, bv
from syguskit.terms import (
    Apply,
    ConstantOfSort,
    Grammar,
    Literal,
    NonterminalRef,
    Term,
    Var,
    VariableOfSort,
    mk_bool,
    mk_bv,
    mk_int,
    mk_str,
)


def printed_size(t: Term) -> int:
    """Node count read off the printed s-expression."""
    return _sexpr_nodes(read_sexpr(print_term(t)))


def _sexpr_nodes(e) -> int:
    if isinstance(e, Atom):
        return 1
    head = e.items[0]
    if isinstance(head, Atom) and head.text == "let":
        bindings = e.items[1].items
        return 1 + sum(_sexpr_nodes(b.items[1]) for b in bindings) + _sexpr_nodes(e.items[2])
    return 1 + sum(_sexpr_nodes(a) for a in e.items[1:])


def _splits(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _splits(total - first, parts - 1):
            yield (first,) + rest


def derivable_set(g: Grammar, max_size: int, params: dict[str, Sort],
                  pool: dict[Sort, list[Term]]) -> set[Term]:
    """Every term of size <= max_size derivable from g.start.

    Each size level is computed by fixpoint iteration so unit productions
    (including cycles) settle before the next level starts.
    """
    nts = [p.nonterminal for p in g.productions]
    alts = {p.nonterminal: p.alternatives for p in g.productions}
    table: dict[str, dict[int, set[Term]]] = {nt: {} for nt in nts}

    def expand(skel: Term, n: int) -> set[Term]:
        if isinstance(skel, NonterminalRef):
            return set(table[skel.name].get(n, ()))
        if isinstance(skel, ConstantOfSort):
            return {c for c in pool.get(skel.sort, []) if printed_size(c) == n}
        if isinstance(skel, VariableOfSort):
            return {Var(v) for v, s in params.items() if s == skel.sort} if n == 1 else set()
        if isinstance(skel, (Literal, Var)):
            return {skel} if n == 1 else set()
        assert isinstance(skel, Apply)
        if not skel.args:
            return {skel} if n == 1 else set()
        out = set()
        for sizes in _splits(n - 1, len(skel.args)):
            choices = [expand(a, k) for a, k in zip(skel.args, sizes)]
            for combo in itertools.product(*choices):
                out.add(Apply(skel.op, tuple(combo)))
        return out

    for n in range(1, max_size + 1):
        for nt in nts:
            table[nt][n] = set()
        changed = True
        while changed:
            changed = False
            for nt in nts:
                for alt in alts[nt]:
                    new = expand(alt, n) - table[nt][n]
                    if new:
                        table[nt][n] |= new
                        changed = True
    return set().union(*(table[g.start][n] for n in range(1, max_size + 1)))


# operator signatures for the term universe: name -> (arg sorts, result sort)
Signature = dict[str, list[tuple[tuple[Sort, ...], Sort]]]


def universe(sig: Signature, leaves: dict[Sort, list[Term]], sort: Sort, max_size: int) -> set[Term]:
    """All well-sorted terms of the given sort up to max_size over sig and leaves."""
    sorts = set(leaves) | {r for ov in sig.values() for _, r in ov} | {
        a for ov in sig.values() for args, _ in ov for a in args}
    table: dict[tuple[Sort, int], set[Term]] = {}
    for n in range(1, max_size + 1):
        for s in sorts:
            cell = set(leaves.get(s, [])) if n == 1 else set()
            for op, overloads in sig.items():
                for args, res in overloads:
                    if res != s or not args:
                        continue
                    for sizes in _splits(n - 1, len(args)):
                        pools = [table.get((a, k), set()) for a, k in zip(args, sizes)]
                        for combo in itertools.product(*pools):
                            cell.add(Apply(op, tuple(combo)))
            table[(s, n)] = cell
    return set().union(*(table[(sort, n)] for n in range(1, max_size + 1)))


B4 = bv(4)

# Five seed grammars, each paired with the operator universe used to probe it.
# The universes deliberately include operators and leaves outside the grammar.
SEEDS = {
    "lia": dict(
        text="""(set-logic LIA)
(synth-fun f ((x Int) (y Int)) Int
  ((Start Int (x y 0 1 (+ Start Start) (ite B Start Start)))
   (B Bool ((<= Start Start)))))
(check-synth)""",
        sig={"+": [((INT, INT), INT)], "-": [((INT, INT), INT)],
             "ite": [((BOOL, INT, INT), INT)], "<=": [((INT, INT), BOOL)],
             "not": [((BOOL,), BOOL)]},
        leaves={INT: [Var("x"), Var("y"), mk_int(0), mk_int(1), mk_int(2)]},
    ),
    "bv": dict(
        text="""(set-logic BV)
(synth-fun f ((u (BitVec 4))) (BitVec 4)
  ((Start (BitVec 4) (u #x1 (bvand Start Start) (bvnot Start) (Constant (BitVec 4))))))
(check-synth)""",
        sig={"bvand": [((B4, B4), B4)], "bvor": [((B4, B4), B4)], "bvnot": [((B4,), B4)],
             "bvneg": [((B4,), B4)]},
        leaves={B4: [Var("u"), mk_bv(0, 4), mk_bv(1, 4), mk_bv(15, 4)]},
    ),
    "string": dict(
        text="""(set-logic SLIA)
(synth-fun f ((s String)) String
  ((Start String (s "a" (str.++ Start Start) (str.substr Start I I)))
   (I Int (0 1 (str.len Start)))))
(check-synth)""",
        sig={"str.++": [((STRING, STRING), STRING)], "str.substr": [((STRING, INT, INT), STRING)],
             "str.at": [((STRING, INT), STRING)], "str.len": [((STRING,), INT)],
             "+": [((INT, INT), INT)]},
        leaves={STRING: [Var("s"), mk_str("a"), mk_str("")], INT: [mk_int(0), mk_int(1)]},
    ),
    "bool": dict(
        text="""(set-logic LIA)
(synth-fun f ((a Bool) (b Bool) (c Bool)) Bool
  ((Start Bool (a b (and Start Start) (not Start) (Variable Bool)))))
(check-synth)""",
        sig={"and": [((BOOL, BOOL), BOOL)], "or": [((BOOL, BOOL), BOOL)], "not": [((BOOL,), BOOL)]},
        leaves={BOOL: [Var("a"), Var("b"), Var("c"), mk_bool(True), mk_bool(False)]},
    ),
    "mixed": dict(
        text="""(set-logic LIA)
(synth-fun f ((x Int) (p Bool)) Int
  ((Start Int (A (ite C Start Start)))
   (A Int (B x (+ A 1)))
   (B Int (A (Constant Int)))
   (C Bool (p (= A B) (not C)))))
(check-synth)""",
        sig={"+": [((INT, INT), INT)], "ite": [((BOOL, INT, INT), INT)],
             "=": [((INT, INT), BOOL)], "not": [((BOOL,), BOOL)], "and": [((BOOL, BOOL), BOOL)]},
        leaves={INT: [Var("x"), mk_int(0), mk_int(1), mk_int(2)], BOOL: [Var("p"), mk_bool(True)]},
    ),
}


def seed_problem(name: str):
    from syguskit.parser import parse_problem

    return parse_problem(SEEDS[name]["text"])


def literal_pool(leaves: dict[Sort, list[Term]]) -> dict[Sort, list[Term]]:
    return {s: [t for t in ts if isinstance(t, Literal)] for s, ts in leaves.items()}


def grouped_by_size(terms: Iterable[Term]) -> list[int]:
    return [printed_size(t) for t in terms]
