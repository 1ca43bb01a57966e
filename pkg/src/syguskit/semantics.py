"""Concrete evaluation of terms under SMT-LIB semantics.

Values are plain Python objects: ``bool``, ``int``, ``str`` and ``BV`` for
bit-vectors. Every theory function is total: integer division by zero
yields 0 (and ``mod`` yields the dividend), bit-vector division follows the
SMT-LIB 2.6 definitions, string functions follow the SMT-LIB totalization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .sorts import BOOL, INT, STRING, Sort
from .terms import Apply, Candidate, FunDef, Let, Literal, Problem, Term, Var, mk_bool, mk_bv, mk_int, mk_str
from .theory import canonical_op


class EvalError(Exception):
    pass


@dataclass(frozen=True, slots=True)
class BV:
    width: int
    value: int

    def __post_init__(self):
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(f"{self.value} does not fit in {self.width} bits")

    @property
    def signed(self) -> int:
        if self.value >> (self.width - 1):
            return self.value - (1 << self.width)
        return self.value

    def __str__(self) -> str:
        return "#b" + format(self.value, f"0{self.width}b")


Value = bool | int | str | BV
Env = Mapping[str, Value]


def value_sort(v: Value) -> Sort:
    from .sorts import bv

    if isinstance(v, bool):
        return BOOL
    if isinstance(v, int):
        return INT
    if isinstance(v, str):
        return STRING
    return bv(v.width)


def value_to_term(v: Value) -> Term:
    if isinstance(v, bool):
        return mk_bool(v)
    if isinstance(v, int):
        return mk_int(v)
    if isinstance(v, str):
        return mk_str(v)
    return mk_bv(v.value, v.width)


def default_value(s: Sort) -> Value:
    if s == BOOL:
        return False
    if s == INT:
        return 0
    if s == STRING:
        return ""
    return BV(s.width, 0)


# ---------------------------------------------------------------------------
# theory functions


def ediv(a: int, b: int) -> int:
    if b == 0:
        return 0
    r = a % abs(b)
    return (a - r) // b


def emod(a: int, b: int) -> int:
    if b == 0:
        return a
    return a % abs(b)


def _bv(f: Callable[[int, int, int], int]):
    def op(args: Sequence[BV]) -> BV:
        a, b = args
        w = a.width
        return BV(w, f(a.value, b.value, w) & ((1 << w) - 1))

    return op


def _udiv(a: int, b: int, w: int) -> int:
    return (1 << w) - 1 if b == 0 else a // b


def _urem(a: int, b: int, w: int) -> int:
    return a if b == 0 else a % b


def _neg(a: int, w: int) -> int:
    return -a & ((1 << w) - 1)


def _sdiv(a: int, b: int, w: int) -> int:
    sa, sb = a >> (w - 1), b >> (w - 1)
    if not sa and not sb:
        return _udiv(a, b, w)
    if sa and not sb:
        return _neg(_udiv(_neg(a, w), b, w), w)
    if not sa and sb:
        return _neg(_udiv(a, _neg(b, w), w), w)
    return _udiv(_neg(a, w), _neg(b, w), w)


def _srem(a: int, b: int, w: int) -> int:
    sa, sb = a >> (w - 1), b >> (w - 1)
    if not sa and not sb:
        return _urem(a, b, w)
    if sa and not sb:
        return _neg(_urem(_neg(a, w), b, w), w)
    if not sa and sb:
        return _urem(a, _neg(b, w), w)
    return _neg(_urem(_neg(a, w), _neg(b, w), w), w)


def _smod(a: int, b: int, w: int) -> int:
    sa, sb = a >> (w - 1), b >> (w - 1)
    abs_a = _neg(a, w) if sa else a
    abs_b = _neg(b, w) if sb else b
    u = _urem(abs_a, abs_b, w)
    if u == 0 or (not sa and not sb):
        return u
    if sa and not sb:
        return (_neg(u, w) + b) & ((1 << w) - 1)
    if not sa and sb:
        return (u + b) & ((1 << w) - 1)
    return _neg(u, w)


def _ashr(a: int, b: int, w: int) -> int:
    if a >> (w - 1):
        if b >= w:
            return (1 << w) - 1
        return ((a - (1 << w)) >> b) & ((1 << w) - 1)
    return a >> b if b < w else 0


def _chain(rel: Callable[[Value, Value], bool]):
    def op(args):
        return all(rel(a, b) for a, b in zip(args, args[1:]))

    return op


def _implies(args):
    result = args[-1]
    for a in reversed(args[:-1]):
        result = (not a) or result
    return result


def _xor(args):
    out = False
    for a in args:
        out = out != a
    return out


def _distinct(args):
    return all(args[i] != args[j] for i in range(len(args)) for j in range(i + 1, len(args)))


def _minus(args):
    if len(args) == 1:
        return -args[0]
    out = args[0]
    for a in args[1:]:
        out -= a
    return out


def _product(args):
    out = 1
    for a in args:
        out *= a
    return out


def _substr(s: str, i: int, n: int) -> str:
    if 0 <= i < len(s) and n > 0:
        return s[i:i + n]
    return ""


def _indexof(s: str, t: str, i: int) -> int:
    if i < 0 or i > len(s):
        return -1
    return s.find(t, i)


def _replace(s: str, t: str, u: str) -> str:
    if t == "":
        return u + s
    return s.replace(t, u, 1)


_DIGITS = re.compile(r"[0-9]+")


def _str_to_int(s: str) -> int:
    return int(s) if _DIGITS.fullmatch(s) else -1


def _bvcmp(rel, signed: bool):
    if signed:
        return lambda args: rel(args[0].signed, args[1].signed)
    return lambda args: rel(args[0].value, args[1].value)


OPS: dict[str, Callable[[list], Value]] = {
    "not": lambda a: not a[0],
    "and": lambda a: all(a),
    "or": lambda a: any(a),
    "=>": _implies,
    "xor": _xor,
    "=": _chain(lambda x, y: x == y),
    "distinct": _distinct,
    "+": sum,
    "-": _minus,
    "*": _product,
    "div": lambda a: ediv(a[0], a[1]),
    "mod": lambda a: emod(a[0], a[1]),
    "abs": lambda a: abs(a[0]),
    "<=": _chain(lambda x, y: x <= y),
    "<": _chain(lambda x, y: x < y),
    ">=": _chain(lambda x, y: x >= y),
    ">": _chain(lambda x, y: x > y),
    "bvnot": lambda a: BV(a[0].width, ~a[0].value & ((1 << a[0].width) - 1)),
    "bvneg": lambda a: BV(a[0].width, _neg(a[0].value, a[0].width)),
    "bvand": _bv(lambda x, y, w: x & y),
    "bvor": _bv(lambda x, y, w: x | y),
    "bvxor": _bv(lambda x, y, w: x ^ y),
    "bvnand": _bv(lambda x, y, w: ~(x & y)),
    "bvnor": _bv(lambda x, y, w: ~(x | y)),
    "bvxnor": _bv(lambda x, y, w: ~(x ^ y)),
    "bvadd": _bv(lambda x, y, w: x + y),
    "bvsub": _bv(lambda x, y, w: x - y),
    "bvmul": _bv(lambda x, y, w: x * y),
    "bvudiv": _bv(_udiv),
    "bvurem": _bv(_urem),
    "bvsdiv": _bv(_sdiv),
    "bvsrem": _bv(_srem),
    "bvsmod": _bv(_smod),
    "bvshl": _bv(lambda x, y, w: x << y if y < w else 0),
    "bvlshr": _bv(lambda x, y, w: x >> y if y < w else 0),
    "bvashr": _bv(_ashr),
    "bvult": _bvcmp(lambda x, y: x < y, False),
    "bvule": _bvcmp(lambda x, y: x <= y, False),
    "bvugt": _bvcmp(lambda x, y: x > y, False),
    "bvuge": _bvcmp(lambda x, y: x >= y, False),
    "bvslt": _bvcmp(lambda x, y: x < y, True),
    "bvsle": _bvcmp(lambda x, y: x <= y, True),
    "bvsgt": _bvcmp(lambda x, y: x > y, True),
    "bvsge": _bvcmp(lambda x, y: x >= y, True),
    "str.++": lambda a: "".join(a),
    "str.len": lambda a: len(a[0]),
    "str.at": lambda a: _substr(a[0], a[1], 1),
    "str.substr": lambda a: _substr(a[0], a[1], a[2]),
    "str.prefixof": lambda a: a[1].startswith(a[0]),
    "str.suffixof": lambda a: a[1].endswith(a[0]),
    "str.contains": lambda a: a[1] in a[0],
    "str.indexof": lambda a: _indexof(a[0], a[1], a[2]),
    "str.replace": lambda a: _replace(a[0], a[1], a[2]),
    "str.to.int": lambda a: _str_to_int(a[0]),
    "int.to.str": lambda a: str(a[0]) if a[0] >= 0 else "",
}
OPS["str.to_int"] = OPS["str.to.int"]
OPS["str.from_int"] = OPS["int.to.str"]


def literal_value(t: Literal) -> Value:
    if t.sort.is_bv:
        return BV(t.sort.width, t.value)
    return t.value


def eval_term(t: Term, env: Env, funs: Mapping[str, FunDef] | None = None) -> Value:
    """Value of ``t`` with free variables taken from ``env``.

    Applications of functions in ``funs`` are evaluated call-by-value, which
    agrees with inlining since every function is total.
    """
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvalError(f"unbound variable {t.name}") from None
    if isinstance(t, Literal):
        return literal_value(t)
    if isinstance(t, Apply):
        op = t.op
        if op == "ite":
            c = eval_term(t.args[0], env, funs)
            return eval_term(t.args[1] if c else t.args[2], env, funs)
        args = [eval_term(a, env, funs) for a in t.args]
        if funs and op in funs:
            fd = funs[op]
            return eval_term(fd.body, dict(zip(fd.param_names, args)), funs)
        try:
            f = OPS[op]
        except KeyError:
            raise EvalError(f"unsupported operator {canonical_op(op)}") from None
        return f(args)
    if isinstance(t, Let):
        inner = dict(env)
        for n, b in t.bindings:
            inner[n] = eval_term(b, env, funs)
        return eval_term(t.body, inner, funs)
    raise EvalError(f"cannot evaluate {t!r}")


# spec-facing name
eval = eval_term  # noqa: A001


def holds_at(problem: Problem, candidates: Sequence[Candidate], point: Env) -> bool:
    """True iff every constraint holds at ``point`` with the candidates plugged in."""
    funs = problem.fun_table()
    for c in candidates:
        funs[c.target] = c.as_fundef()
    return all(eval_term(c, point, funs) is True for c in problem.constraints)
