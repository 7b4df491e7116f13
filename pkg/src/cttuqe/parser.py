"""Recursive-descent parser for the ASCII surface syntax.

Sugar is expanded while parsing, so the result is always a core expression.
Unicode symbols from the usual notation are accepted as aliases.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from . import sugar
from .errors import CttError, CttSyntaxError, TypeMismatch, UnknownBaseType, UnknownSymbol
from .syntax import (
    EPS,
    EPS_CONSTANT_TYPES,
    INDEXED_FAMILIES,
    O,
    Abs,
    App,
    Arrow,
    Base,
    Cond,
    Const,
    Eval,
    Quote,
    Var,
    eq_const,
    iota_const,
)

_UNICODE = {
    "λ": "\\",
    "∀": "!",
    "∃": "?",
    "¬": "~",
    "∧": "/\\",
    "∨": "\\/",
    "⊃": "=>",
    "≡": "<=>",
    "≠": "/=",
    "≃": "==",
    "⊥": "bot",
    "→": "->",
    "⊏": " sub ",
    "⌜": "[[",
    "⌝": "]]",
    "↓": "!",
    "↑": "^",
    "ι": "iota",
}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:-[A-Za-z0-9_']+)*)
  | (?P<sym>[*+&%$|]+'*)
  | (?P<op><=>|=>|->|/\\|\\/|/=|==|\[\[|\]\]|[=~!?^\\().,:@])
    """,
    re.VERBOSE,
)

KEYWORDS = {"if", "T", "F", "bot", "eval", "evalw", "I", "sub", "iota"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    for k, v in _UNICODE.items():
        text = text.replace(k, v)
    out = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise CttSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        else:
            nl = m.group().count("\n")
            if nl:
                line += nl
                line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class Parser:
    def __init__(self, text: str, theory=None, env=None):
        self.toks = tokenize(text)
        self.i = 0
        self.theory = theory
        self.scope: List[Var] = list(env or ())

    # ------------------------------------------------------------ plumbing

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("op", "ident")

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def fail(self, msg, tok=None):
        tok = tok or self.tok
        raise CttSyntaxError(msg, tok.line, tok.col)

    def located(self, fn, *args):
        tok = self.tok
        try:
            return fn(*args)
        except (TypeMismatch, UnknownSymbol, UnknownBaseType) as exc:
            if getattr(exc, "_located", False):
                raise
            exc.args = (f"{exc.args[0]} (line {tok.line}, column {tok.col})",)
            exc._located = True
            raise

    def done(self):
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r}")

    # ------------------------------------------------------------ types

    def parse_type(self):
        dom = self.atomic_type()
        if self.at("->"):
            self.next()
            return Arrow(dom, self.parse_type())
        return dom

    def atomic_type(self):
        t = self.tok
        if self.at("("):
            self.next()
            ty = self.parse_type()
            self.expect(")")
            return ty
        if t.kind == "ident":
            self.next()
            if self.theory is not None and t.text not in self.theory.bases:
                raise UnknownBaseType(f"unknown base type {t.text} (line {t.line}, column {t.col})")
            return Base(t.text)
        self.fail(f"expected a type, found {t.text or 'end of input'!r}")

    # ------------------------------------------------------------ expressions

    def parse_expr(self):
        return self.iff()

    def iff(self):
        lhs = self.imp()
        if self.at("<=>"):
            tok = self.next()
            rhs = self.imp()
            return self._build(tok, sugar.equiv, lhs, rhs)
        return lhs

    def imp(self):
        lhs = self.disj()
        if self.at("=>"):
            tok = self.next()
            rhs = self.imp()
            return self._build(tok, sugar.implies, lhs, rhs)
        return lhs

    def disj(self):
        lhs = self.conj()
        while self.at("\\/"):
            tok = self.next()
            lhs = self._build(tok, sugar.or_, lhs, self.conj())
        return lhs

    def conj(self):
        lhs = self.neg()
        while self.at("/\\"):
            tok = self.next()
            lhs = self._build(tok, sugar.and_, lhs, self.neg())
        return lhs

    def neg(self):
        if self.at("~"):
            tok = self.next()
            return self._build(tok, sugar.not_, self.neg())
        if self.at("\\") or self.at("!") or self.at("?") or (
            self.at("I") and self.peek().kind == "ident" and self.peek(2).text == ":"
        ):
            return self.binder()
        return self.cmp()

    def binder(self):
        kind = self.next()
        name = self.tok
        if name.kind != "ident":
            self.fail("expected a variable name after binder")
        self.next()
        self.expect(":")
        ty = self.parse_type()
        self.expect(".")
        x = Var(name.text, ty)
        self.scope.append(x)
        try:
            body = self.parse_expr()
        finally:
            self.scope.pop()
        builders = {
            "\\": Abs,
            "!": sugar.forall,
            "?": sugar.exists,
            "I": sugar.descr,
        }
        return self._build(kind, builders[kind.text], x, body)

    def cmp(self):
        lhs = self.infix()
        ops = {"=": sugar.eq, "/=": sugar.neq, "==": sugar.quasi_eq, "sub": sugar.subexpr}
        if self.tok.text in ops and self.tok.kind in ("op", "ident"):
            tok = self.next()
            rhs = self.infix()
            return self._build(tok, ops[tok.text], lhs, rhs)
        return lhs

    def infix(self):
        lhs = self.postfix()
        while self.tok.kind == "sym":
            tok = self.next()
            op = self._resolve_symbol(tok)
            rhs = self.postfix()
            lhs = self._build(tok, lambda a, b: App(App(op, a), b), lhs, rhs)
        return lhs

    def postfix(self):
        e = self.app()
        while self.at("!") or self.at("^"):
            tok = self.next()
            e = self._build(tok, sugar.is_defined if tok.text == "!" else sugar.is_undefined, e)
        return e

    def app(self):
        if self.at("if"):
            tok = self.next()
            test, then, orelse = self.atom(), self.atom(), self.atom()
            e = self._build(tok, Cond, test, then, orelse)
        else:
            e = self.atom()
        while self._atom_start():
            tok = self.tok
            e = self._build(tok, App, e, self.atom())
        return e

    def _atom_start(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return t.text not in ("if", "sub", "I") or (
                t.text == "I" and self.peek().text == ":"
            )
        return t.kind == "op" and t.text in ("(", "[[")

    def _build(self, tok, fn, *args):
        try:
            return fn(*args)
        except CttError as exc:
            if isinstance(exc, CttSyntaxError) or getattr(exc, "_located", False):
                raise
            exc.args = (f"{exc.args[0]} (line {tok.line}, column {tok.col})",)
            exc._located = True
            raise

    def atom(self):
        t = self.tok
        if self.at("("):
            self.next()
            nxt = self.tok
            if nxt.text == "=" and self.peek().text == "@":
                self.next()
                self.next()
                ty = self.parse_type()
                self.expect(")")
                return eq_const(ty)
            if nxt.text == "sub" and self.peek().text == ")":
                self.next()
                self.next()
                return Const("sub", EPS_CONSTANT_TYPES["sub"])
            if nxt.kind == "sym" and self.peek().text in (")", ":"):
                self.next()
                ty = None
                if self.at(":"):
                    self.next()
                    ty = self.parse_type()
                self.expect(")")
                return self._resolve_symbol(nxt, ty)
            e = self.parse_expr()
            self.expect(")")
            return e
        if self.at("[["):
            tok = self.next()
            body = self.parse_expr()
            self.expect("]]")
            return self._build(tok, Quote, body)
        if t.kind != "ident":
            self.fail(f"unexpected {t.text or 'end of input'!r}")
        self.next()
        name = t.text
        if name in ("T", "F") and not self.at(":"):
            return sugar.TRUE if name == "T" else sugar.FALSE
        if name == "bot":
            self.expect(":")
            return self._build(t, sugar.bottom, self.atomic_type())
        if name in ("eval", "evalw"):
            self.expect("(")
            code = self.parse_expr()
            self.expect(",")
            if name == "eval":
                ty = self.parse_type()
                self.expect(")")
                return self._build(t, sugar.eval_at, code, ty)
            witness = self.parse_expr()
            self.expect(")")
            return self._build(t, Eval, code, witness)
        if name == "iota" and self.at("@"):
            self.next()
            ty = self.atomic_type()
            return self._build(t, iota_const, ty)
        if name in INDEXED_FAMILIES and self.at("@"):
            self.next()
            ty = self.atomic_type()
            return Const(name, Arrow(EPS, O), index=ty)
        if self.at(":"):
            self.next()
            ty = self.atomic_type()
            return self._annotated(t, ty)
        return self._bare(t)

    # ------------------------------------------------------------ names

    def _annotated(self, tok, ty):
        name = tok.text
        if name in EPS_CONSTANT_TYPES and EPS_CONSTANT_TYPES[name] == ty:
            return Const(name, ty)
        if self.theory is not None:
            c = self.theory.lookup(name, ty)
            if c is not None:
                return c
        return Var(name, ty)

    def _bare(self, tok):
        name = tok.text
        for v in reversed(self.scope):
            if v.name == name:
                return v
        if name in EPS_CONSTANT_TYPES:
            return Const(name, EPS_CONSTANT_TYPES[name])
        return self._unique_const(tok)

    def _unique_const(self, tok, ty=None):
        name = tok.text
        found = self.theory.consts_named(name) if self.theory is not None else []
        if ty is not None:
            found = [c for c in found if c.ty == ty]
        if len(found) == 1:
            return found[0]
        where = f" (line {tok.line}, column {tok.col})"
        if not found:
            raise UnknownSymbol(f"unknown symbol {name}{where}")
        raise UnknownSymbol(f"{name} is overloaded; write {name}:TYPE{where}")

    def _resolve_symbol(self, tok, ty=None):
        return self._unique_const(tok, ty)


def parse_expr(text: str, theory=None, env=None):
    """Parse an expression in the language of ``theory`` (or logic only)."""
    p = Parser(text, theory, env)
    e = p.parse_expr()
    p.done()
    return e


def parse_type(text: str, theory=None):
    p = Parser(text, theory)
    ty = p.parse_type()
    p.done()
    return ty


def try_parse_type(text: str, theory=None) -> Optional[object]:
    try:
        return parse_type(text, theory)
    except CttError:
        return None
