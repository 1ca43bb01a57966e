"""Operator signatures for the Core, Ints, FixedSizeBitVectors and Strings theories."""

from __future__ import annotations

from typing import Sequence

from .sorts import BOOL, INT, STRING, Sort, SortError

CORE_OPS = ("not", "and", "or", "=>", "xor", "=", "distinct", "ite")
INT_OPS = ("+", "-", "*", "div", "mod", "abs", "<=", "<", ">=", ">")
BV_UNARY = ("bvnot", "bvneg")
BV_BINARY = (
    "bvand", "bvor", "bvxor", "bvnand", "bvnor", "bvxnor",
    "bvadd", "bvsub", "bvmul", "bvudiv", "bvurem", "bvsdiv", "bvsrem", "bvsmod",
    "bvshl", "bvlshr", "bvashr",
)
BV_COMPARE = (
    "bvult", "bvule", "bvugt", "bvuge", "bvslt", "bvsle", "bvsgt", "bvsge",
)
STR_OPS = (
    "str.++", "str.len", "str.at", "str.substr", "str.prefixof", "str.suffixof",
    "str.contains", "str.indexof", "str.replace", "str.to.int", "int.to.str",
)
# newer SMT-LIB spellings accepted on input, evaluated identically
STR_ALIASES = {"str.to_int": "str.to.int", "str.from_int": "int.to.str"}

_STR_SIGS: dict[str, tuple[tuple[Sort, ...], Sort]] = {
    "str.len": ((STRING,), INT),
    "str.at": ((STRING, INT), STRING),
    "str.substr": ((STRING, INT, INT), STRING),
    "str.prefixof": ((STRING, STRING), BOOL),
    "str.suffixof": ((STRING, STRING), BOOL),
    "str.contains": ((STRING, STRING), BOOL),
    "str.indexof": ((STRING, STRING, INT), INT),
    "str.replace": ((STRING, STRING, STRING), STRING),
    "str.to.int": ((STRING,), INT),
    "int.to.str": ((INT,), STRING),
}

ALL_OPS = frozenset(
    CORE_OPS + INT_OPS + BV_UNARY + BV_BINARY + BV_COMPARE + STR_OPS + tuple(STR_ALIASES)
)


def canonical_op(op: str) -> str:
    return STR_ALIASES.get(op, op)


def _need(op: str, args: Sequence[Sort], n: int | None = None, at_least: int | None = None):
    if n is not None and len(args) != n:
        raise SortError(f"{op} expects {n} arguments, got {len(args)}")
    if at_least is not None and len(args) < at_least:
        raise SortError(f"{op} expects at least {at_least} arguments, got {len(args)}")


def _all(op: str, args: Sequence[Sort], sort: Sort):
    for i, s in enumerate(args):
        if s != sort:
            raise SortError(f"argument {i + 1} of {op} has sort {s}, expected {sort}")


def result_sort(op: str, args: Sequence[Sort]) -> Sort:
    """Result sort of theory operator ``op`` applied to ``args``."""
    op = canonical_op(op)
    if op == "not":
        _need(op, args, 1)
        _all(op, args, BOOL)
        return BOOL
    if op in ("and", "or", "xor", "=>"):
        _need(op, args, at_least=2 if op in ("=>", "xor") else 1)
        _all(op, args, BOOL)
        return BOOL
    if op in ("=", "distinct"):
        _need(op, args, at_least=2)
        _all(op, args, args[0])
        return BOOL
    if op == "ite":
        _need(op, args, 3)
        if args[0] != BOOL:
            raise SortError(f"ite condition has sort {args[0]}, expected Bool")
        if args[1] != args[2]:
            raise SortError(f"ite branches differ: {args[1]} vs {args[2]}")
        return args[1]
    if op == "-":
        _need(op, args, at_least=1)
        _all(op, args, INT)
        return INT
    if op in ("+", "*"):
        _need(op, args, at_least=2)
        _all(op, args, INT)
        return INT
    if op in ("div", "mod"):
        _need(op, args, 2)
        _all(op, args, INT)
        return INT
    if op == "abs":
        _need(op, args, 1)
        _all(op, args, INT)
        return INT
    if op in ("<=", "<", ">=", ">"):
        _need(op, args, at_least=2)
        _all(op, args, INT)
        return BOOL
    if op in BV_UNARY:
        _need(op, args, 1)
        if not args[0].is_bv:
            raise SortError(f"{op} expects a bit-vector, got {args[0]}")
        return args[0]
    if op in BV_BINARY or op in BV_COMPARE:
        _need(op, args, 2)
        if not args[0].is_bv:
            raise SortError(f"{op} expects bit-vectors, got {args[0]}")
        _all(op, args, args[0])
        return BOOL if op in BV_COMPARE else args[0]
    if op == "str.++":
        _need(op, args, at_least=2)
        _all(op, args, STRING)
        return STRING
    if op in _STR_SIGS:
        params, ret = _STR_SIGS[op]
        _need(op, args, len(params))
        for i, (want, got) in enumerate(zip(params, args)):
            if want != got:
                raise SortError(f"argument {i + 1} of {op} has sort {got}, expected {want}")
        return ret
    raise SortError(f"unknown symbol {op}")


def logic_theories(logic: str) -> set[str]:
    """Theories named by a SyGuS logic string: subset of {"LIA", "BV", "S"}."""
    name = logic.upper().removeprefix("QF_")
    if name == "ALL":
        return {"LIA", "BV", "S"}
    out = set()
    if "BV" in name:
        out.add("BV")
    if name.startswith("S"):
        out.add("S")
    if "IA" in name:
        out.add("LIA")
    return out
