"""Parser and pretty-printer for the ``.qp`` program language.

Example::

    var x
    array a[3] = {1, 2, 3}
    mutex m

    thread t0 {
      lock(m)
      x = a[x] + 1       # statements are newline separated
      unlock(m)
    }

A mutex may be declared initially held with ``mutex m = 1``; this is how a
thread can be kept from starting until another thread releases ``m``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from qpor.errors import ExecutionError, ParseError
from qpor.program import (
    Assert, Assign, Binary, Expr, If, Index, Lock, MutexDecl, Name, Num, Program,
    Stmt, ThreadDef, Unary, Unlock, VarDecl, While,
)

KEYWORDS = {"var", "array", "mutex", "thread", "lock", "unlock", "assert", "if", "else", "while"}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>&&|\|\||==|!=|<=|>=|[-+*/%<>!=(){}\[\],])
""", re.VERBOSE)

# binary operator -> precedence (higher binds tighter)
PRECEDENCE = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}
_UNARY_PREC = 7


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


@dataclass
class SourceProgram:
    path: str | None
    text: str
    program: Program
    threads: tuple  # ThreadDef nodes; statements carry their line numbers


def tokenize(text: str, path: str | None = None) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError("syntax-error", f"unexpected character {text[pos]!r}",
                             line, pos - line_start + 1, path)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            word = m.group()
            if kind == "ident" and word in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, word, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, path: str | None):
        self.path = path
        self.toks = tokenize(text, path)
        self.i = 0
        self.scalars: set[str] = set()
        self.arrays: set[str] = set()
        self.mutexes: set[str] = set()
        self.thread_names: set[str] = set()
        self.last_line = 0

    # -- token helpers ---------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, kind: str, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(kind, msg, tok.line, tok.col, self.path)

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        self.last_line = t.line
        return t

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            shown = self.tok.text or "end of file"
            raise self.error("syntax-error", f"expected '{text}', found '{shown}'")
        return self.take()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            shown = self.tok.text or "end of file"
            raise self.error("syntax-error", f"expected identifier, found '{shown}'")
        return self.take()

    def integer(self) -> int:
        sign = 1
        if self.at("-"):
            self.take()
            sign = -1
        if self.tok.kind != "int":
            raise self.error("syntax-error", f"expected integer, found '{self.tok.text}'")
        return sign * int(self.take().text)

    def declare(self, tok: Token) -> None:
        name = tok.text
        if name in self.scalars or name in self.arrays or name in self.mutexes:
            raise self.error("duplicate-declaration", f"'{name}' is already declared", tok)

    # -- grammar ---------------------------------------------------------

    def program(self) -> SourceProgram:
        variables, mutexes, threads = [], [], []
        while self.at("var") or self.at("array") or self.at("mutex"):
            kw = self.take()
            name = self.ident()
            self.declare(name)
            if kw.text == "var":
                init: tuple = ()
                if self.at("="):
                    self.take()
                    init = (self.integer(),)
                self.scalars.add(name.text)
                variables.append(VarDecl(name.text, None, init, line=kw.line))
            elif kw.text == "array":
                self.expect("[")
                size_tok = self.tok
                size = self.integer()
                if size <= 0:
                    raise self.error("syntax-error", "array size must be positive", size_tok)
                self.expect("]")
                init = ()
                if self.at("="):
                    self.take()
                    self.expect("{")
                    values = [self.integer()]
                    while self.at(","):
                        self.take()
                        values.append(self.integer())
                    self.expect("}")
                    if len(values) > size:
                        raise self.error("syntax-error", f"too many initial values for '{name.text}'", name)
                    init = tuple(values)
                self.arrays.add(name.text)
                variables.append(VarDecl(name.text, size, init, line=kw.line))
            else:
                locked = False
                if self.at("="):
                    self.take()
                    val_tok = self.tok
                    val = self.integer()
                    if val not in (0, 1):
                        raise self.error("syntax-error", "a mutex starts as 0 (free) or 1 (held)", val_tok)
                    locked = bool(val)
                self.mutexes.add(name.text)
                mutexes.append(MutexDecl(name.text, locked, line=kw.line))
        if not self.at("thread"):
            raise self.error("syntax-error", "expected a declaration or 'thread'")
        while self.at("thread"):
            kw = self.take()
            name = self.ident()
            if name.text in self.thread_names:
                raise self.error("duplicate-declaration", f"thread '{name.text}' is already declared", name)
            self.thread_names.add(name.text)
            body = self.block()
            threads.append(ThreadDef(name.text, body, line=kw.line))
        if self.tok.kind != "eof":
            raise self.error("syntax-error", f"unexpected '{self.tok.text}' after the last thread")
        try:
            prog = Program(variables, mutexes, threads)
        except ExecutionError as exc:  # pragma: no cover - parser checks first
            raise ParseError(exc.kind, str(exc), exc.line or 0, 0, self.path) from exc
        return SourceProgram(self.path, "", prog, tuple(threads))

    def block(self) -> tuple:
        self.expect("{")
        stmts: list[Stmt] = []
        after_brace = True
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("syntax-error", "unterminated block")
            if not after_brace and self.tok.line == self.last_line:
                raise self.error("syntax-error", "statements must be separated by a newline")
            stmts.append(self.statement())
            after_brace = False
        self.take()
        return tuple(stmts)

    def statement(self) -> Stmt:
        t = self.tok
        if self.at("lock") or self.at("unlock"):
            self.take()
            self.expect("(")
            if self.at(")"):
                raise self.error("lock-arity", f"{t.text} takes exactly one mutex")
            m = self.ident()
            if self.at(","):
                raise self.error("lock-arity", f"{t.text} takes exactly one mutex")
            self.expect(")")
            if m.text not in self.mutexes:
                kind = "lock-arity" if (m.text in self.scalars or m.text in self.arrays) else "undeclared-identifier"
                raise self.error(kind, f"'{m.text}' is not a declared mutex", m)
            cls = Lock if t.text == "lock" else Unlock
            return cls(m.text, line=t.line)
        if self.at("assert"):
            self.take()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return Assert(cond, line=t.line)
        if self.at("if"):
            self.take()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.block()
            orelse: tuple = ()
            if self.at("else"):
                self.take()
                orelse = self.block()
            return If(cond, then, orelse, line=t.line)
        if self.at("while"):
            self.take()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return While(cond, self.block(), line=t.line)
        if t.kind == "ident":
            target = self.lvalue()
            self.expect("=")
            return Assign(target, self.expr(), line=t.line)
        raise self.error("syntax-error", f"expected a statement, found '{t.text or 'end of file'}'")

    def lvalue(self) -> Name | Index:
        t = self.ident()
        if self.at("["):
            if t.text not in self.arrays:
                raise self._undeclared(t, "array")
            self.take()
            idx = self.expr()
            self.expect("]")
            return Index(t.text, idx)
        if t.text not in self.scalars:
            raise self._undeclared(t, "variable")
        return Name(t.text)

    def _undeclared(self, t: Token, what: str) -> ParseError:
        if t.text in self.scalars or t.text in self.arrays or t.text in self.mutexes:
            return self.error("type-error", f"'{t.text}' is not a {what}", t)
        return self.error("undeclared-identifier", f"'{t.text}' is not declared", t)

    def expr(self, min_prec: int = 1) -> Expr:
        left = self.unary()
        while self.tok.kind == "op" and PRECEDENCE.get(self.tok.text, 0) >= min_prec:
            op = self.take().text
            right = self.expr(PRECEDENCE[op] + 1)
            left = Binary(op, left, right)
        return left

    def unary(self) -> Expr:
        if self.at("!") or self.at("-"):
            op = self.take().text
            operand = self.unary()
            if op == "-" and isinstance(operand, Num):
                return Num(-operand.value)
            return Unary(op, operand)
        return self.atom()

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.take()
            return Num(int(t.text))
        if self.at("("):
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.take()
            if self.at("["):
                if t.text not in self.arrays:
                    raise self._undeclared(t, "array")
                self.take()
                idx = self.expr()
                self.expect("]")
                return Index(t.text, idx)
            if t.text not in self.scalars:
                raise self._undeclared(t, "variable")
            return Name(t.text)
        raise self.error("syntax-error", f"expected an expression, found '{t.text or 'end of file'}'")


def parse(text: str, path: str | None = None) -> SourceProgram:
    src = _Parser(text, path).program()
    src.text = text
    return src


def parse_file(path: str | Path) -> SourceProgram:
    p = Path(path)
    return parse(p.read_text(encoding="utf-8"), str(p))


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return PRECEDENCE[e.op]
    if isinstance(e, Unary) or (isinstance(e, Num) and e.value < 0):
        return _UNARY_PREC
    return 99


def format_expr(e: Expr) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Index):
        return f"{e.name}[{format_expr(e.index)}]"
    if isinstance(e, Unary):
        inner = format_expr(e.operand)
        if _prec(e.operand) < _UNARY_PREC:
            inner = f"({inner})"
        return f"{e.op}{inner}"
    p = PRECEDENCE[e.op]
    left = format_expr(e.left)
    if _prec(e.left) < p:
        left = f"({left})"
    right = format_expr(e.right)
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


def format_stmt_head(s: Stmt) -> str:
    if isinstance(s, Assign):
        return f"{format_expr(s.target)} = {format_expr(s.value)}"
    if isinstance(s, Lock):
        return f"lock({s.mutex})"
    if isinstance(s, Unlock):
        return f"unlock({s.mutex})"
    if isinstance(s, Assert):
        return f"assert({format_expr(s.cond)})"
    if isinstance(s, If):
        return f"if ({format_expr(s.cond)})"
    if isinstance(s, While):
        return f"while ({format_expr(s.cond)})"
    raise TypeError(s)


def _format_block(stmts: tuple, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    for s in stmts:
        if isinstance(s, If):
            out.append(f"{pad}{format_stmt_head(s)} {{")
            _format_block(s.then, indent + 1, out)
            if s.orelse:
                out.append(f"{pad}}} else {{")
                _format_block(s.orelse, indent + 1, out)
            out.append(f"{pad}}}")
        elif isinstance(s, While):
            out.append(f"{pad}{format_stmt_head(s)} {{")
            _format_block(s.body, indent + 1, out)
            out.append(f"{pad}}}")
        else:
            out.append(pad + format_stmt_head(s))


def format_program(program: Program) -> str:
    out: list[str] = []
    for v in program.variables:
        if v.size is None:
            out.append(f"var {v.name}" + (f" = {v.init[0]}" if v.init and v.init[0] else ""))
        else:
            init = ""
            if any(v.init):
                init = " = {" + ", ".join(str(x) for x in v.init) + "}"
            out.append(f"array {v.name}[{v.size}]{init}")
    for m in program.mutexes:
        out.append(f"mutex {m.name}" + (" = 1" if m.locked else ""))
    for t in program.threads:
        out.append("")
        out.append(f"thread {t.name} {{")
        _format_block(t.body, 1, out)
        out.append("}")
    return "\n".join(out) + "\n"
