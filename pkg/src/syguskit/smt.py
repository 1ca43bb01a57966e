"""External SMT solver process interface (SMT-LIB2 over stdin/stdout)."""

from __future__ import annotations

import logging
import os
import selectors
import shlex
import shutil
import subprocess
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .printer import bv_literal, symbol
from .semantics import BV, Value, default_value
from .sexpr import Atom, ParseError, SList, decode_smt_string, read_sexprs
from .sorts import BOOL, INT, STRING, Sort
from .terms import Apply, Let, Literal, Term, Var
from .theory import logic_theories

log = logging.getLogger(__name__)

DEFAULT_QUERY_TIMEOUT = 60.0
ENV_VAR = "SYGUS_SMT_SOLVER"


class BackendError(Exception):
    """The SMT backend process failed (crashed, was killed, or produced garbage)."""


class ModelError(BackendError):
    """The backend answered sat but its model could not be read."""


def smt_string(s: str) -> str:
    # backslashes and anything outside printable ASCII go out as \u{..} escapes
    out = []
    for ch in s:
        if ch == '"':
            out.append('""')
        elif ch == "\\" or not " " <= ch <= "~":
            out.append(f"\\u{{{ord(ch):x}}}")
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def smt_term(t: Term) -> str:
    """SMT-LIB 2.6 text for ``t``."""
    out: list[str] = []
    _emit(t, out)
    return "".join(out)


def _emit(t: Term, out: list[str]) -> None:
    if isinstance(t, Literal):
        s = t.sort
        if s == BOOL:
            out.append("true" if t.value else "false")
        elif s == INT:
            out.append(str(t.value))
        elif s.is_bv:
            out.append(bv_literal(t.value, s.width))
        else:
            out.append(smt_string(t.value))
    elif isinstance(t, Var):
        out.append(symbol(t.name))
    elif isinstance(t, Apply):
        if not t.args:
            out.append(symbol(t.op))
            return
        out.append("(" + symbol(t.op))
        for a in t.args:
            out.append(" ")
            _emit(a, out)
        out.append(")")
    elif isinstance(t, Let):
        out.append("(let (")
        out.append(" ".join(f"({symbol(n)} {smt_term(b)})" for n, b in t.bindings))
        out.append(") ")
        _emit(t.body, out)
        out.append(")")
    else:
        raise TypeError(f"cannot emit {t!r}")


def smt_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v) if v >= 0 else f"(- {-v})"
    if isinstance(v, str):
        return smt_string(v)
    return bv_literal(v.value, v.width)


def backend_logic(logic: str) -> str:
    """Logic name sent to the backend for a SyGuS logic."""
    if logic.upper() == "ALL":
        return "ALL"
    theories = logic_theories(logic)
    if "S" in theories:
        return "QF_SLIA"
    if theories == {"BV"}:
        return "BV"
    if theories == {"LIA"}:
        return "LIA"
    return "ALL"


def parse_value(e, sort: Sort) -> Value:
    """Read a model value printed by the backend."""
    if isinstance(e, Atom):
        if sort == BOOL and e.text in ("true", "false"):
            return e.text == "true"
        if sort == INT and e.kind == "numeral":
            return int(e.text)
        if sort.is_bv and e.kind == "binary":
            return BV(sort.width, int(e.text[2:], 2))
        if sort.is_bv and e.kind == "hex":
            return BV(sort.width, int(e.text[2:], 16))
        if sort == STRING and e.kind == "string":
            return decode_smt_string(e.text)
    elif isinstance(e, SList):
        items = e.items
        if sort == INT and len(items) == 2 and isinstance(items[0], Atom) and items[0].text == "-":
            return -parse_value(items[1], INT)
        if sort.is_bv and len(items) == 3 and isinstance(items[0], Atom) and items[0].text == "_":
            return BV(sort.width, int(items[1].text[2:]))
    raise ModelError(f"cannot read {sort} value from backend output: {e}")


def resolve_solver_command(path: str | None = None, args: Sequence[str] | None = None) -> list[str]:
    """Command line for the backend: flag, then $SYGUS_SMT_SOLVER, then z3 on PATH."""
    path = path or os.environ.get(ENV_VAR)
    if path:
        parts = shlex.split(path)
    else:
        found = shutil.which("z3")
        if found is None:
            raise BackendError(f"no SMT solver: pass --smt-solver or set {ENV_VAR}")
        parts = [found]
    if args is None:
        name = os.path.basename(parts[0])
        if len(parts) > 1:
            args = []
        elif name.startswith("z3"):
            args = ["-in", "-smt2"]
        elif name.startswith("cvc"):
            args = ["--lang=smt2", "--produce-models", "--strings-exp"]
        else:
            args = []
    return parts + list(args)


@dataclass
class CheckResult:
    status: str  # sat | unsat | unknown | timeout
    model: dict[str, Value] = field(default_factory=dict)
    reason: str = ""


@dataclass
class SmtSession:
    """One serial connection to an SMT backend.

    Each query runs in a fresh backend process: the script is written, the
    answer to (check-sat) is read, and on sat (get-model) is requested.
    """

    command: list[str] = field(default_factory=lambda: resolve_solver_command())
    timeout: float = DEFAULT_QUERY_TIMEOUT
    logic_override: str | None = None
    queries: int = 0
    last_script: str = ""
    _busy: bool = False

    @classmethod
    def create(cls, solver: str | None = None, timeout: float = DEFAULT_QUERY_TIMEOUT,
               logic: str | None = None) -> "SmtSession":
        return cls(command=resolve_solver_command(solver), timeout=timeout, logic_override=logic)

    def check(self, logic: str, decls: Mapping[str, Sort], assertions: Sequence[Term]) -> CheckResult:
        """Check satisfiability of the assertions over free constants ``decls``."""
        lines = [f"(set-option :produce-models true)",
                 f"(set-logic {self.logic_override or backend_logic(logic)})"]
        for name, s in decls.items():
            lines.append(f"(declare-const {symbol(name)} {s.smtlib()})")
        for a in assertions:
            lines.append(f"(assert {smt_term(a)})")
        return self.run_script("\n".join(lines) + "\n", decls)

    def run_script(self, script: str, decls: Mapping[str, Sort]) -> CheckResult:
        if self._busy:
            raise BackendError("session already has a query in flight")
        self._busy = True
        try:
            return self._run(script, decls)
        finally:
            self._busy = False

    def _run(self, script: str, decls: Mapping[str, Sort]) -> CheckResult:
        self.queries += 1
        self.last_script = script
        deadline = time.monotonic() + self.timeout
        try:
            proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.PIPE, text=True,
            )
        except OSError as e:
            raise BackendError(f"cannot start {self.command[0]}: {e}") from None
        try:
            proc.stdin.write(script + "(check-sat)\n")
            proc.stdin.flush()
            answer = _read_until(proc, deadline, lambda buf: "\n" in buf)
            if answer is None:
                return CheckResult("timeout", reason=f"backend exceeded {self.timeout:g} s")
            answer = answer.strip()
            if answer == "unsat":
                return CheckResult("unsat")
            if answer == "unknown":
                return CheckResult("unknown", reason="backend returned unknown")
            if answer != "sat":
                err = proc.stderr.read() if proc.poll() is not None else ""
                raise BackendError(
                    f"unexpected backend answer {answer!r} (exit {proc.poll()}) {err.strip()}"
                )
            proc.stdin.write("(get-model)\n(exit)\n")
            proc.stdin.flush()
            proc.stdin.close()
            text = _read_until(proc, deadline, None)
            if text is None:
                return CheckResult("timeout", reason="backend timed out producing a model")
            return CheckResult("sat", model=_read_model(text, decls))
        except BrokenPipeError:
            raise BackendError(f"backend exited early (code {proc.wait()})") from None
        finally:
            if proc.poll() is None:
                proc.kill()
            proc.wait()
            for f in (proc.stdout, proc.stderr):
                f.close()
            if not proc.stdin.closed:
                try:
                    proc.stdin.close()
                except BrokenPipeError:
                    pass


def _read_until(proc: subprocess.Popen, deadline: float, done) -> str | None:
    """Read stdout until ``done(buffer)`` (or EOF when done is None); None on timeout.

    EOF before ``done`` with a signal exit code is a backend failure.
    """
    fd = proc.stdout.fileno()
    sel = selectors.DefaultSelector()
    sel.register(fd, selectors.EVENT_READ)
    buf = []
    try:
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return None
            if not sel.select(remaining):
                return None
            chunk = os.read(fd, 65536).decode()
            if not chunk:
                text = "".join(buf)
                code = proc.wait()
                if done is None and code == 0:
                    return text
                if done is None and text.strip():
                    return text
                raise BackendError(f"backend terminated unexpectedly (exit code {code})")
            buf.append(chunk)
            if done is not None and done("".join(buf)):
                return "".join(buf)
    finally:
        sel.close()


def _read_model(text: str, decls: Mapping[str, Sort]) -> dict[str, Value]:
    try:
        items = read_sexprs(text)
    except ParseError as e:
        raise ModelError(f"unreadable model: {e}") from None
    model: dict[str, Value] = {}
    for item in items:
        if not isinstance(item, SList):
            continue
        if item.head() == "error":
            raise ModelError(f"backend error: {item}")
        defs = item.items
        if defs and isinstance(defs[0], Atom) and defs[0].text == "model":
            defs = defs[1:]
        for d in defs:
            if isinstance(d, SList) and d.head() == "define-fun" and len(d.items) == 5:
                name = d.items[1].text
                if name in decls and not d.items[2].items:
                    model[name] = parse_value(d.items[4], decls[name])
    for name, s in decls.items():
        # unconstrained variables may be omitted by the backend
        model.setdefault(name, default_value(s))
    return model
