"""Defined constants and abbreviations, expanded into the seven core formers.

Every helper returns the literal expansion, so the kernel only ever stores
core expressions.  :func:`recognize` inverts the expansions for printing.
Several expansions coincide (``A <=> B`` and ``A = B`` at type o, the bottom
of type o and ``F``), so recognition returns the most specific reading.
"""

from __future__ import annotations

import enum
from typing import Optional, Tuple

from .errors import DefiniteDescrAtO, TypeMismatch
from .syntax import (
    EPS,
    O,
    Abs,
    App,
    Const,
    Eval,
    Expr,
    Var,
    arrow,
    eq_const,
    iota_const,
)

WITNESS_NAME = "_w"


class SugarForm(enum.Enum):
    EQ = "eq"
    EQUIV = "equiv"
    TRUE = "true"
    FALSE = "false"
    FORALL = "forall"
    AND = "and"
    IMPLIES = "implies"
    NOT = "not"
    OR = "or"
    EXISTS = "exists"
    NEQ = "neq"
    SUBEXPR = "subexpr"
    EVAL = "eval"
    IS_DEFINED = "is-defined"
    IS_UNDEFINED = "is-undefined"
    QUASI_EQ = "quasi-eq"
    DESCR = "descr"
    BOTTOM = "bottom"


_OOO = arrow(O, O, O)
_x = Var("x", O)
_y = Var("y", O)
_g = Var("g", _OOO)

TRUE = App(App(eq_const(_OOO), eq_const(O)), eq_const(O))
FALSE = App(App(eq_const(arrow(O, O)), Abs(_x, TRUE)), Abs(_x, _x))

AND_FN = Abs(
    _x,
    Abs(
        _y,
        App(
            App(eq_const(arrow(_OOO, O)), Abs(_g, App(App(_g, TRUE), TRUE))),
            Abs(_g, App(App(_g, _x), _y)),
        ),
    ),
)
NOT_FN = App(eq_const(O), FALSE)


def eq(a: Expr, b: Expr) -> Expr:
    if a.ty != b.ty:
        raise TypeMismatch(f"cannot equate {a.ty} with {b.ty}")
    return App(App(eq_const(a.ty), a), b)


def _need_o(*es):
    for e in es:
        if e.ty != O:
            raise TypeMismatch(f"expected a formula, got type {e.ty}")


def equiv(a: Expr, b: Expr) -> Expr:
    _need_o(a, b)
    return eq(a, b)


def and_(a: Expr, b: Expr) -> Expr:
    _need_o(a, b)
    return App(App(AND_FN, a), b)


IMPLIES_FN = Abs(_x, Abs(_y, eq(_x, and_(_x, _y))))


def not_(a: Expr) -> Expr:
    _need_o(a)
    return App(NOT_FN, a)


OR_FN = Abs(_x, Abs(_y, not_(and_(not_(_x), not_(_y)))))


def implies(a: Expr, b: Expr) -> Expr:
    _need_o(a, b)
    return App(App(IMPLIES_FN, a), b)


def or_(a: Expr, b: Expr) -> Expr:
    _need_o(a, b)
    return App(App(OR_FN, a), b)


def forall(x: Var, a: Expr) -> Expr:
    _need_o(a)
    return eq(Abs(x, TRUE), Abs(x, a))


def exists(x: Var, a: Expr) -> Expr:
    return not_(forall(x, not_(a)))


def neq(a: Expr, b: Expr) -> Expr:
    return not_(eq(a, b))


def subexpr(a: Expr, b: Expr) -> Expr:
    if a.ty != EPS or b.ty != EPS:
        raise TypeMismatch("sub compares two eps expressions")
    return App(App(Const("sub", arrow(EPS, EPS, O)), a), b)


def eval_at(code: Expr, ty) -> Expr:
    """Evaluation at a type, with the canonical witness variable ``_w``."""
    return Eval(code, Var(WITNESS_NAME, ty))


def is_defined(a: Expr) -> Expr:
    return eq(a, a)


def is_undefined(a: Expr) -> Expr:
    return not_(is_defined(a))


def quasi_eq(a: Expr, b: Expr) -> Expr:
    if a.ty != b.ty:
        raise TypeMismatch(f"cannot quasi-equate {a.ty} with {b.ty}")
    return implies(or_(is_defined(a), is_defined(b)), eq(a, b))


def descr(x: Var, a: Expr) -> Expr:
    _need_o(a)
    if x.ty == O:
        raise DefiniteDescrAtO("definite description is not available at type o")
    return App(iota_const(x.ty), Abs(x, a))


def bottom(ty) -> Expr:
    if ty == O:
        return FALSE
    x = Var("x", ty)
    return descr(x, neq(x, x))


_BUILDERS = {
    SugarForm.EQ: eq,
    SugarForm.EQUIV: equiv,
    SugarForm.TRUE: lambda: TRUE,
    SugarForm.FALSE: lambda: FALSE,
    SugarForm.FORALL: forall,
    SugarForm.AND: and_,
    SugarForm.IMPLIES: implies,
    SugarForm.NOT: not_,
    SugarForm.OR: or_,
    SugarForm.EXISTS: exists,
    SugarForm.NEQ: neq,
    SugarForm.SUBEXPR: subexpr,
    SugarForm.EVAL: eval_at,
    SugarForm.IS_DEFINED: is_defined,
    SugarForm.IS_UNDEFINED: is_undefined,
    SugarForm.QUASI_EQ: quasi_eq,
    SugarForm.DESCR: descr,
    SugarForm.BOTTOM: bottom,
}


def elaborate(form: SugarForm, *args) -> Expr:
    """Expand ``form`` applied to ``args`` into a core expression.

    Binder forms take ``(Var, body)``; ``EVAL`` and ``BOTTOM`` take a type.
    """
    try:
        return _BUILDERS[form](*args)
    except TypeError as exc:
        raise TypeMismatch(f"bad arguments for {form.value}: {exc}") from exc


# ---------------------------------------------------------------- recognition


def _binary(e, head=None):
    """Split ``f a b`` into ``(f, a, b)``."""
    if isinstance(e, App) and isinstance(e.fun, App):
        return e.fun.fun, e.fun.arg, e.arg
    return None


def _is_eq_const(c) -> bool:
    return isinstance(c, Const) and c.name == "="


def recognize(e: Expr) -> Optional[Tuple[SugarForm, tuple]]:
    """Return ``(form, args)`` such that ``elaborate(form, *args) == e``, or None."""
    if e == TRUE:
        return SugarForm.TRUE, ()
    if e == FALSE:
        return SugarForm.FALSE, ()
    if isinstance(e, Eval):
        w = e.witness
        if isinstance(w, Var) and w.name == WITNESS_NAME:
            return SugarForm.EVAL, (e.code, w.ty)
        return None
    if not isinstance(e, App):
        return None
    if isinstance(e.fun, Const) and e.fun.name == "iota" and isinstance(e.arg, Abs):
        x, body = e.arg.var, e.arg.body
        if e == bottom(x.ty):
            return SugarForm.BOTTOM, (x.ty,)
        if body.ty == O:
            return SugarForm.DESCR, (x, body)
        return None
    parts = _binary(e)
    if parts is None:
        return None
    fn, a, b = parts
    if fn == AND_FN:
        return SugarForm.AND, (a, b)
    if fn == OR_FN:
        return SugarForm.OR, (a, b)
    if fn == IMPLIES_FN:
        lhs = _binary(a)
        if lhs is not None and lhs[0] == OR_FN:
            da, db = recognize(lhs[1]), recognize(lhs[2])
            if (
                da is not None
                and db is not None
                and da[0] is SugarForm.IS_DEFINED
                and db[0] is SugarForm.IS_DEFINED
                and b == eq(da[1][0], db[1][0])
            ):
                return SugarForm.QUASI_EQ, (da[1][0], db[1][0])
        return SugarForm.IMPLIES, (a, b)
    if isinstance(fn, Const) and fn.name == "sub":
        return SugarForm.SUBEXPR, (a, b)
    if not _is_eq_const(fn):
        return None
    if fn.ty.dom == O and a == FALSE:
        inner = recognize(b)
        if inner is not None:
            form, args = inner
            if form is SugarForm.FORALL:
                neg = recognize(args[1])
                if neg is not None and neg[0] is SugarForm.NOT:
                    return SugarForm.EXISTS, (args[0], neg[1][0])
            if form is SugarForm.IS_DEFINED:
                return SugarForm.IS_UNDEFINED, args
            if form is SugarForm.EQ:
                return SugarForm.NEQ, args
        return SugarForm.NOT, (b,)
    if (
        isinstance(a, Abs)
        and isinstance(b, Abs)
        and a.var == b.var
        and a.body == TRUE
        and b.body.ty == O
    ):
        return SugarForm.FORALL, (b.var, b.body)
    if a == b:
        return SugarForm.IS_DEFINED, (a,)
    return SugarForm.EQ, (a, b)
