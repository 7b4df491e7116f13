"""ASCII pretty-printer.  Output re-sugars greedily and reparses to the same
expression (given the same theory context)."""

from __future__ import annotations

import re

from .sugar import SugarForm, recognize
from .syntax import Abs, App, Arrow, Base, Cond, Const, Eval, Quote, Var

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*(?:-[A-Za-z0-9_']+)*\Z")
SYMBOL = re.compile(r"[*+&%$|]+'*\Z")

_RESERVED = {"if", "T", "F", "bot", "eval", "evalw", "I", "sub", "iota"}

BINDER, IFF, IMP, OR, AND, NOT, CMP, INFIX, POST, APP, ATOM = range(11)


def _names(bound):
    return {b.name for b in bound}


def print_type(ty) -> str:
    return str(ty)


def atomic_type(ty) -> str:
    return str(ty) if isinstance(ty, Base) else f"({ty})"


def is_symbolic(name: str) -> bool:
    return bool(SYMBOL.match(name))


class Printer:
    def __init__(self, theory=None):
        self.theory = theory

    def __call__(self, e) -> str:
        return self.show(e, BINDER, ())

    def _wrap(self, text, prec, ctx):
        return f"({text})" if prec < ctx else text

    def _const(self, c: Const, bound) -> str:
        if c.name == "=":
            return f"(=@{c.ty.dom})"
        if c.name == "iota":
            return f"iota@{atomic_type(c.ty.cod)}"
        if c.index is not None:
            return f"{c.name}@{atomic_type(c.index)}"
        if c.name == "sub":
            return "(sub)"
        if c.is_logical:
            return c.name if c.name not in _names(bound) else f"{c.name}:{atomic_type(c.ty)}"
        ann = c.name in _names(bound)
        if self.theory is not None and len(self.theory.consts_named(c.name)) > 1:
            ann = True
        if is_symbolic(c.name):
            return f"({c.name}:{atomic_type(c.ty)})" if ann else f"({c.name})"
        return f"{c.name}:{atomic_type(c.ty)}" if ann else c.name

    def _var(self, v: Var, bound) -> str:
        for b in reversed(bound):
            if b.name == v.name:
                if b == v and v.name not in _RESERVED:
                    return v.name
                break
        return f"{v.name}:{atomic_type(v.ty)}"

    def _binder(self, sym, x, body, ctx, bound):
        text = f"{sym}{x.name}:{x.ty}. {self.show(body, BINDER, bound + (x,))}"
        return self._wrap(text, BINDER, ctx)

    def show(self, e, ctx, bound) -> str:
        s = recognize(e)
        if s is not None:
            out = self._sugar(s[0], s[1], ctx, bound)
            if out is not None:
                return out
        if isinstance(e, Var):
            return self._var(e, bound)
        if isinstance(e, Const):
            return self._const(e, bound)
        if isinstance(e, Abs):
            return self._binder("\\", e.var, e.body, ctx, bound)
        if isinstance(e, Cond):
            parts = " ".join(self.show(p, ATOM, bound) for p in (e.test, e.then, e.orelse))
            return self._wrap(f"if {parts}", APP, ctx)
        if isinstance(e, Quote):
            return f"[[{self.show(e.body, BINDER, bound)}]]"
        if isinstance(e, Eval):
            return f"evalw({self.show(e.code, BINDER, bound)}, {self.show(e.witness, BINDER, bound)})"
        if isinstance(e, App):
            fn, args = e.fun, [e.arg]
            if (
                isinstance(fn, App)
                and isinstance(fn.fun, Const)
                and is_symbolic(fn.fun.name)
                and not fn.fun.is_logical
                and self._infix_ok(fn.fun, bound)
            ):
                lhs = self.show(fn.arg, INFIX, bound)
                rhs = self.show(e.arg, POST, bound)
                return self._wrap(f"{lhs} {fn.fun.name} {rhs}", INFIX, ctx)
            text = f"{self.show(fn, APP, bound)} {self.show(e.arg, ATOM, bound)}"
            return self._wrap(text, APP, ctx)
        raise TypeError(f"not an expression: {e!r}")

    def _infix_ok(self, c, bound):
        if c.name in _names(bound):
            return False
        return self.theory is None or len(self.theory.consts_named(c.name)) <= 1

    def _sugar(self, form, args, ctx, bound):
        show = self.show
        F = SugarForm
        if form is F.TRUE:
            return "T"
        if form is F.FALSE:
            return "F"
        if form is F.BOTTOM:
            return f"bot:{atomic_type(args[0])}"
        if form is F.EVAL:
            return f"eval({show(args[0], BINDER, bound)}, {args[1]})"
        if form is F.FORALL:
            return self._binder("!", args[0], args[1], ctx, bound)
        if form is F.EXISTS:
            return self._binder("?", args[0], args[1], ctx, bound)
        if form is F.DESCR:
            return self._binder("I ", args[0], args[1], ctx, bound)
        if form is F.IMPLIES:
            text = f"{show(args[0], OR, bound)} => {show(args[1], IMP, bound)}"
            return self._wrap(text, IMP, ctx)
        if form is F.OR:
            text = f"{show(args[0], OR, bound)} \\/ {show(args[1], AND, bound)}"
            return self._wrap(text, OR, ctx)
        if form is F.AND:
            text = f"{show(args[0], AND, bound)} /\\ {show(args[1], NOT, bound)}"
            return self._wrap(text, AND, ctx)
        if form is F.NOT:
            return self._wrap(f"~{show(args[0], NOT, bound)}", NOT, ctx)
        ops = {F.EQ: "=", F.NEQ: "/=", F.QUASI_EQ: "==", F.SUBEXPR: "sub"}
        if form in ops:
            text = f"{show(args[0], INFIX, bound)} {ops[form]} {show(args[1], INFIX, bound)}"
            return self._wrap(text, CMP, ctx)
        if form is F.IS_DEFINED:
            return self._wrap(f"{show(args[0], POST, bound)}!", POST, ctx)
        if form is F.IS_UNDEFINED:
            return self._wrap(f"{show(args[0], POST, bound)}^", POST, ctx)
        return None


def print_expr(e, theory=None) -> str:
    return Printer(theory)(e)
