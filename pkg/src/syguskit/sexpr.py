"""S-expression reader for SMT-LIB / SyGuS-IF text, with source positions."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .terms import FRESH_MARK


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int
    end_line: int
    end_column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan | None = None):
        self.message = message
        self.span = span
        where = f"{span}: " if span is not None else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class Atom:
    text: str
    kind: str  # symbol | keyword | numeral | decimal | binary | hex | string
    span: SourceSpan | None = None

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple
    span: SourceSpan | None = None

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __iter__(self):
        return iter(self.items)

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom) and self.items[0].kind == "symbol":
            return self.items[0].text
        return None


SExpr = Atom | SList

_SIMPLE_CHARS = r"A-Za-z0-9~!@$%^&*_\-+=<>.?/"
_SIMPLE_SYMBOL = re.compile(rf"[{_SIMPLE_CHARS}]+")
_NUMERAL = re.compile(r"0|[1-9][0-9]*")
_DECIMAL = re.compile(r"(0|[1-9][0-9]*)\.[0-9]+")
_WS = " \t\r\n"
_DELIMS = set(_WS) | {"(", ")", ";", '"', "|"}


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _mark(self):
        return self.pos, self.line, self.col

    def _span(self, mark) -> SourceSpan:
        return SourceSpan(mark[0], self.pos, mark[1], mark[2], self.line, self.col)

    def _point_span(self) -> SourceSpan:
        return SourceSpan(self.pos, self.pos, self.line, self.col, self.line, self.col)

    def skip(self) -> None:
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c in _WS:
                self._advance()
            elif c == ";":
                while self.pos < len(text) and text[self.pos] != "\n":
                    self._advance()
            else:
                break

    def read_all(self) -> list[SExpr]:
        out = []
        while True:
            self.skip()
            if self.pos >= len(self.text):
                return out
            out.append(self.read())

    def read(self) -> SExpr:
        self.skip()
        if self.pos >= len(self.text):
            raise ParseError("unexpected end of input", self._point_span())
        c = self.text[self.pos]
        mark = self._mark()
        if c == "(":
            self._advance()
            items = []
            while True:
                self.skip()
                if self.pos >= len(self.text):
                    raise ParseError("unbalanced parentheses: missing ')'", self._span(mark))
                if self.text[self.pos] == ")":
                    self._advance()
                    return SList(tuple(items), self._span(mark))
                items.append(self.read())
        if c == ")":
            self._advance()
            raise ParseError("unbalanced parentheses: unexpected ')'", self._span(mark))
        if c == '"':
            return self._string(mark)
        if c == "|":
            self._advance()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos] != "|":
                if self.text[self.pos] == "\\":
                    raise ParseError("'\\' not allowed in quoted symbol", self._point_span())
                self._advance()
            if self.pos >= len(self.text):
                raise ParseError("unterminated quoted symbol", self._span(mark))
            name = self.text[start:self.pos]
            self._advance()
            span = self._span(mark)
            _check_identifier(name, span)
            return Atom(name, "symbol", span)
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _DELIMS:
            self._advance()
        tok = self.text[start:self.pos]
        span = self._span(mark)
        return Atom(tok, _classify(tok, span), span)

    def _string(self, mark) -> Atom:
        self._advance()
        chars = []
        text = self.text
        while True:
            if self.pos >= len(text):
                raise ParseError("unterminated string literal", self._span(mark))
            c = text[self.pos]
            if c == '"':
                if self.pos + 1 < len(text) and text[self.pos + 1] == '"':
                    chars.append('"')
                    self._advance(2)
                    continue
                self._advance()
                break
            if not (" " <= c <= "~") and c not in "\t\n":
                raise ParseError(f"non-printable character {c!r} in string literal", self._point_span())
            chars.append(c)
            self._advance()
        return Atom("".join(chars), "string", self._span(mark))


def _classify(tok: str, span: SourceSpan) -> str:
    if tok.startswith(":"):
        if len(tok) > 1 and _SIMPLE_SYMBOL.fullmatch(tok[1:]):
            return "keyword"
    elif tok.startswith("#b"):
        if re.fullmatch(r"#b[01]+", tok):
            return "binary"
    elif tok.startswith("#x"):
        if re.fullmatch(r"#x[0-9a-fA-F]+", tok):
            return "hex"
    elif tok[0].isdigit():
        if _NUMERAL.fullmatch(tok):
            return "numeral"
        if _DECIMAL.fullmatch(tok):
            return "decimal"
    elif _SIMPLE_SYMBOL.fullmatch(tok):
        return "symbol"
    if FRESH_MARK in tok:
        raise ParseError(f"reserved character {FRESH_MARK!r} in identifier {tok!r}", span)
    raise ParseError(f"invalid token {tok!r}", span)


def _check_identifier(name: str, span: SourceSpan) -> None:
    if FRESH_MARK in name:
        raise ParseError(f"reserved character {FRESH_MARK!r} in identifier {name!r}", span)


def read_sexprs(text: str) -> list[SExpr]:
    """Read every top-level s-expression in ``text``."""
    return _Reader(text).read_all()


def read_sexpr(text: str) -> SExpr:
    """Read exactly one s-expression."""
    items = read_sexprs(text)
    if len(items) != 1:
        raise ParseError(f"expected one s-expression, found {len(items)}")
    return items[0]


def decode_smt_string(s: str) -> str:
    """Decode SMT-LIB 2.6 ``\\u{..}``/``\\ud..`` escapes as printed by SMT solvers."""

    def repl(m: re.Match) -> str:
        return chr(int(m.group(1) or m.group(2), 16))

    return re.sub(r"\\u\{([0-9a-fA-F]{1,5})\}|\\u([0-9a-fA-F]{4})", repl, s)


def is_simple_symbol(name: str) -> bool:
    return bool(_SIMPLE_SYMBOL.fullmatch(name)) and not name[0].isdigit()
