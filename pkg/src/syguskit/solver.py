"""Reference CEGIS solver using divide-and-conquer unification.

Terms are enumerated in size order and each is scored by the set of
counterexample points at which it satisfies the constraints. When no
single term covers every point, a decision tree over enumerated predicates
routes each point to a term that covers it; the tree becomes nested ``ite``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .grammar import Enumerator, derives
from .semantics import Env, EvalError, eval_term, holds_at
from .smt import SmtSession
from .sorts import BOOL
from .terms import (
    Apply,
    Candidate,
    Grammar,
    NonterminalRef,
    Problem,
    Production,
    SynthFun,
    Term,
    Var,
    applications_of,
    ite,
    mentions,
)
from .verifier import Invalid, Valid, desugar_inv, verify

log = logging.getLogger(__name__)


class Unsolved(Exception):
    pass


class Exhausted(Unsolved):
    """The search space up to the budget's size caps holds no solution."""


class TimedOut(Unsolved):
    """The wall-clock budget ran out."""


SolveTimeout = TimedOut


class NoSeparator(Exception):
    """No predicate distinguishes points that need different terms."""


@dataclass
class Budget:
    wall_seconds: float = 60.0
    max_term_size: int = 12
    max_pred_size: int = 7
    max_rounds: int = 64

    def __post_init__(self):
        if min(self.wall_seconds, self.max_term_size, self.max_pred_size, self.max_rounds) <= 0:
            raise ValueError("budget limits must be positive")


@dataclass
class SolveStats:
    rounds: int = 0
    counterexamples: list[Env] = field(default_factory=list)
    candidates: list[Term] = field(default_factory=list)
    seconds: float = 0.0


# ---------------------------------------------------------------------------
# decision trees


@dataclass(frozen=True)
class Leaf:
    term: Term


@dataclass(frozen=True)
class Node:
    predicate: Term
    then: "Leaf | Node"
    else_: "Leaf | Node"


DecisionTree = Leaf | Node


def flatten(dt: DecisionTree) -> Term:
    if isinstance(dt, Leaf):
        return dt.term
    return ite(dt.predicate, flatten(dt.then), flatten(dt.else_))


@dataclass
class CoverMatrix:
    """Rows are candidate terms, columns are points; ``rows[i]`` is a bitmask of
    the points term ``i`` satisfies."""

    terms: list[Term]
    rows: list[int]
    n_points: int

    def covers(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    @classmethod
    def from_cells(cls, terms: Sequence[Term], cells: Sequence[Sequence[bool]]) -> "CoverMatrix":
        rows = [sum(1 << j for j, c in enumerate(row) if c) for row in cells]
        n = len(cells[0]) if cells else 0
        return cls(list(terms), rows, n)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _entropy(rows: Sequence[int], mask: int) -> float:
    counts = [_popcount(r & mask) for r in rows]
    total = sum(counts)
    if total == 0:
        return 0.0
    return -sum(c / total * math.log(c / total) for c in counts if c)


def learn_tree(m: CoverMatrix, preds: Sequence[Term], points: Sequence[Env] | None = None,
               pred_masks: Sequence[int] | None = None) -> DecisionTree:
    """Exact ID3-style learner: every point ends in a leaf whose term covers it.

    Predicates are chosen by information gain over the multiset of labels
    (the covering terms of each point); ties go to the smaller predicate, then
    the earlier one. Raises NoSeparator when a set of points has no common
    covering term and no predicate splits it.
    """
    if pred_masks is None:
        if points is None:
            raise ValueError("need points or precomputed predicate masks")
        pred_masks = []
        for p in preds:
            mask = 0
            for j, pt in enumerate(points):
                if eval_term(p, pt) is True:
                    mask |= 1 << j
            pred_masks.append(mask)
    full = (1 << m.n_points) - 1
    for j in range(m.n_points):
        if not any(r >> j & 1 for r in m.rows):
            raise ValueError(f"point {j} is covered by no term")
    order = sorted(range(len(m.terms)), key=lambda i: m.terms[i].size)
    pred_order = sorted(range(len(preds)), key=lambda i: preds[i].size)

    def build(mask: int) -> DecisionTree:
        for i in order:
            if m.rows[i] & mask == mask:
                return Leaf(m.terms[i])
        n = _popcount(mask)
        base = _entropy(m.rows, mask)
        best = None
        best_gain = -math.inf
        for i in pred_order:
            pos = pred_masks[i] & mask
            neg = mask & ~pred_masks[i]
            if not pos or not neg:
                continue
            gain = base - (_popcount(pos) / n) * _entropy(m.rows, pos) \
                - (_popcount(neg) / n) * _entropy(m.rows, neg)
            if gain > best_gain + 1e-12:
                best, best_gain = i, gain
        if best is None:
            raise NoSeparator(f"no predicate separates points {_bits(mask)}")
        pos = pred_masks[best] & mask
        return Node(preds[best], build(pos), build(mask & ~pred_masks[best]))

    return build(full)


def _bits(mask: int) -> list[int]:
    return [j for j in range(mask.bit_length()) if mask >> j & 1]


def _useful(terms: Sequence[Term], rows: Sequence[int], n: int) -> CoverMatrix:
    """Cover matrix restricted to terms whose coverage no earlier term subsumes."""
    kept_t: list[Term] = []
    kept_r: list[int] = []
    for t, r in zip(terms, rows):
        if r == 0 or any(k | r == k for k in kept_r):
            continue
        # a later, larger cover set evicts the earlier subsets it contains
        keep = [i for i, k in enumerate(kept_r) if k | r != r]
        kept_t = [kept_t[i] for i in keep] + [t]
        kept_r = [kept_r[i] for i in keep] + [r]
    return CoverMatrix(kept_t, kept_r, n)


# ---------------------------------------------------------------------------
# constraint analysis


@dataclass
class _Shape:
    """How the synth-fun is called inside the constraints."""

    separable: bool  # every constraint calls f on a single argument tuple
    observable: bool  # no call argument mentions f, so call-site values are known
    calls: list[tuple[Term, tuple[Term, ...] | None]]  # per constraint: args of its f-call


def _shape(p: Problem, f: str) -> _Shape:
    calls = []
    separable = True
    observable = True
    for c in p.constraints:
        apps = applications_of(c, f)
        tuples = {a.args for a in apps}
        if any(mentions(arg, f) for a in apps for arg in a.args):
            observable = False
            separable = False
        if len(tuples) > 1:
            separable = False
        calls.append((c, next(iter(tuples)) if len(tuples) == 1 else None))
    return _Shape(separable, observable, calls)


def _ite_condition(g: Grammar) -> Grammar | None:
    """Grammar for the predicates of the start symbol's ite alternative, if any."""
    for alt in g.production(g.start).alternatives:
        if isinstance(alt, Apply) and alt.op == "ite" and len(alt.args) == 3:
            a, b = alt.args[1], alt.args[2]
            if a != NonterminalRef(g.start) or b != NonterminalRef(g.start):
                continue
            cond = alt.args[0]
            if isinstance(cond, NonterminalRef):
                return g.with_start(cond.name)
            return Grammar("Pred'", (Production("Pred'", BOOL, (cond,)),) + g.productions)
    return None


# ---------------------------------------------------------------------------
# CEGIS loop


class _Round:
    """Synthesis against a fixed point set."""

    def __init__(self, p: Problem, sf: SynthFun, shape: _Shape, points: list[Env],
                 budget: Budget, deadline: float, use_predicates: bool = True):
        self.p = p
        self.sf = sf
        self.shape = shape
        self.points = points
        self.budget = budget
        self.deadline = deadline
        self.funs = p.fun_table()
        self.params = [n for n, _ in sf.params]
        self.pred_grammar = _ite_condition(sf.grammar) if use_predicates else None
        self._build_units()

    def _call_env(self, args: Sequence[Term], point: Env) -> Env:
        return {n: eval_term(a, point, self.funs) for n, a in zip(self.params, args)}

    def _build_units(self):
        """Columns of the cover matrix.

        Separable constraint sets get one column per distinct call-site input
        (the decision tree then routes on those inputs); otherwise one column
        per counterexample point.
        """
        self.samples: list[Env] = []  # param environments used for dedup / predicates
        self.units: list[list[tuple[Term, Env, Env]]] = []
        if self.shape.separable:
            index: dict[tuple, int] = {}
            for point in self.points:
                for c, args in self.shape.calls:
                    if args is None:
                        continue
                    env = self._call_env(args, point)
                    key = tuple(env[n] for n in self.params)
                    key = tuple((type(v), v) for v in key)
                    if key not in index:
                        index[key] = len(self.samples)
                        self.samples.append(env)
                        self.units.append([])
                    self.units[index[key]].append((c, point, env))
        else:
            seen = {}
            for point in self.points:
                self.units.append([(None, point, None)])
                if self.shape.observable:
                    for c, _ in self.shape.calls:
                        for a in applications_of(c, self.sf.name):
                            env = self._call_env(a.args, point)
                            key = tuple((type(env[n]), env[n]) for n in self.params)
                            if key not in seen:
                                seen[key] = True
                                self.samples.append(env)
        self.full = (1 << len(self.units)) - 1

    def _candidate(self, body: Term) -> Candidate:
        return Candidate(self.sf.name, self.sf.params, self.sf.return_sort, body)

    def coverage(self, t: Term) -> int:
        mask = 0
        if self.shape.separable:
            funs = dict(self.funs)
            funs[self.sf.name] = self._candidate(t).as_fundef()
            for j, unit in enumerate(self.units):
                try:
                    if all(eval_term(c, point, funs) is True for c, point, _ in unit):
                        mask |= 1 << j
                except EvalError:
                    pass
        else:
            cand = [self._candidate(t)]
            for j, unit in enumerate(self.units):
                if holds_at(self.p, cand, unit[0][1]):
                    mask |= 1 << j
        return mask

    def _pred_mask(self, pred: Term) -> int:
        mask = 0
        for j, unit in enumerate(self.units):
            if eval_term(pred, unit[0][2]) is True:
                mask |= 1 << j
        return mask

    def _check_time(self):
        if time.monotonic() > self.deadline:
            raise TimedOut("wall-clock budget exhausted")

    def run(self) -> Term:
        budget = self.budget
        terms = Enumerator(self.sf.grammar, self.sf.params,
                           self.samples if self.shape.observable else None, self.funs)
        terms.deadline = self.deadline
        term_list: list[Term] = []
        rows: list[int] = []
        union = 0
        tsize = 0
        preds = None
        pred_list: list[Term] = []
        pred_masks: list[int] = []
        psize = 0
        unify = self.pred_grammar is not None and self.shape.separable and len(self.units) > 1
        if unify:
            preds = Enumerator(self.pred_grammar, self.sf.params, self.samples, self.funs)
            preds.deadline = self.deadline
        tried_at = None
        while True:
            self._check_time()
            if unify and union == self.full and tried_at != (len(term_list), len(pred_list)):
                tried_at = (len(term_list), len(pred_list))
                m = _useful(term_list, rows, len(self.units))
                try:
                    tree = learn_tree(m, pred_list, pred_masks=pred_masks)
                    body = flatten(tree)
                    if derives(self.sf.grammar, body, self.sf.params):
                        return body
                except NoSeparator:
                    pass
                if psize < budget.max_pred_size:
                    psize += 1
                    for q in preds.terms_of_size(psize):
                        pred_list.append(q)
                        pred_masks.append(self._pred_mask(q))
                    continue
            if tsize >= budget.max_term_size:
                if unify and union == self.full and psize < budget.max_pred_size:
                    psize += 1
                    for q in preds.terms_of_size(psize):
                        pred_list.append(q)
                        pred_masks.append(self._pred_mask(q))
                    continue
                raise Exhausted(
                    f"no solution with terms up to size {budget.max_term_size}"
                    + (f" and predicates up to size {budget.max_pred_size}" if unify else "")
                )
            tsize += 1
            for t in terms.terms_of_size(tsize):
                mask = self.coverage(t)
                if mask == self.full:
                    return t
                term_list.append(t)
                rows.append(mask)
                union |= mask


def solve(p: Problem, budget: Budget | None = None, session: SmtSession | None = None,
          stats: SolveStats | None = None, use_predicates: bool = True) -> list[Candidate]:
    """Synthesize a verified candidate for the single synth-fun of ``p``.

    Raises Exhausted when the size caps or the round limit are hit, and
    TimedOut when the wall-clock budget runs out.
    """
    budget = budget or Budget()
    session = session or SmtSession.create()
    stats = stats if stats is not None else SolveStats()
    start = time.monotonic()
    deadline = start + budget.wall_seconds
    if len(p.synth_funs) != 1:
        raise ValueError(
            f"the reference solver handles one synth-fun, this problem has {len(p.synth_funs)}"
        )
    if p.kind == "Invariant" or p.inv_constraints:
        p = desugar_inv(p)
    sf = p.synth_funs[0]
    if sf.grammar is None:
        from .grammar import default_grammar

        sf = SynthFun(sf.name, sf.params, sf.return_sort,
                      default_grammar(p.logic, sf.params, sf.return_sort))
    shape = _shape(p, sf.name)
    points: list[Env] = []
    try:
        while True:
            if stats.rounds >= budget.max_rounds:
                raise Exhausted(f"round limit {budget.max_rounds} reached")
            stats.rounds += 1
            try:
                body = _Round(p, sf, shape, points, budget, deadline, use_predicates).run()
            except TimeoutError:
                raise TimedOut("wall-clock budget exhausted during enumeration") from None
            cand = Candidate(sf.name, sf.params, sf.return_sort, body)
            stats.candidates.append(body)
            log.debug("round %d: candidate %s", stats.rounds, body)
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise TimedOut("wall-clock budget exhausted")
            saved = session.timeout
            session.timeout = min(saved, remaining)
            try:
                verdict = verify(p, [cand], session)
            finally:
                session.timeout = saved
            if not isinstance(verdict, (Valid, Invalid)) and time.monotonic() >= deadline:
                raise TimedOut("wall-clock budget exhausted during verification")
            if isinstance(verdict, Valid):
                return [cand]
            if not isinstance(verdict, Invalid):
                raise Exhausted(f"verifier could not decide: {verdict.reason}")
            cex = dict(verdict.counterexample)
            # each counterexample must be new information for the current candidate
            assert not holds_at(p, [cand], cex), "counterexample is covered by the candidate"
            assert cex not in points, "counterexample repeats an earlier point"
            points.append(cex)
            stats.counterexamples.append(cex)
    finally:
        stats.seconds = time.monotonic() - start
