"""The construction encoder, its inverse, and the syntactic predicates
interpreted by the eps-manipulating logical constants."""

from __future__ import annotations

from .errors import NotAConstruction, NotEvalFree, CttError
from .syntax import (
    EPS,
    EPS_CONSTANT_TYPES as _T,
    Abs,
    App,
    Cond,
    Const,
    Expr,
    Quote,
    Var,
    free_vars,
    is_eval_free,
    subexpressions,
)

APP = Const("app", _T["app"])
ABS = Const("abs", _T["abs"])
COND = Const("cond", _T["cond"])
QUO = Const("quo", _T["quo"])


class Construction:
    """An eps-typed expression in the range of the encoder.

    Stored by the eval-free expression it represents; the encoded form is
    computed on demand.  Equality is equality of the represented expression,
    which coincides with equality of encodings because encoding is injective.
    """

    __slots__ = ("decoded", "_expr")

    def __init__(self, decoded: Expr):
        if not is_eval_free(decoded):
            raise NotEvalFree("constructions represent eval-free expressions only")
        self.decoded = decoded
        self._expr = None

    @property
    def expr(self) -> Expr:
        if self._expr is None:
            self._expr = _encode(self.decoded)
        return self._expr

    def __eq__(self, other):
        return isinstance(other, Construction) and self.decoded == other.decoded

    def __hash__(self):
        return hash(("Construction", self.decoded))

    def __repr__(self):
        from .printer import print_expr

        return f"Construction([[{print_expr(self.decoded)}]])"


def encode(e: Expr) -> Construction:
    if not is_eval_free(e):
        raise NotEvalFree("only eval-free expressions have constructions")
    return Construction(e)


def encode_expr(e: Expr) -> Expr:
    """The encoding of ``e`` as a plain eps-typed expression."""
    return encode(e).expr


def _encode(e):
    if isinstance(e, (Var, Const)):
        return Quote(e)
    if isinstance(e, App):
        return App(App(APP, _encode(e.fun)), _encode(e.arg))
    if isinstance(e, Abs):
        return App(App(ABS, _encode(e.var)), _encode(e.body))
    if isinstance(e, Cond):
        return App(App(App(COND, _encode(e.test)), _encode(e.then)), _encode(e.orelse))
    if isinstance(e, Quote):
        return App(QUO, _encode(e.body))
    raise NotEvalFree("evaluations have no construction")


def decode(c) -> Expr:
    """Inverse of the encoder; raises :class:`NotAConstruction` outside its range."""
    if isinstance(c, Construction):
        return c.decoded
    if c.ty != EPS:
        raise NotAConstruction(f"expression of type {c.ty} is not a construction")
    return _decode(c)


def _decode(c):
    if isinstance(c, Quote):
        if isinstance(c.body, (Var, Const)):
            return c.body
        raise NotAConstruction("a quotation is a construction only around a variable or constant")
    head, args = _spine(c)
    try:
        if head == APP and len(args) == 2:
            return App(_decode(args[0]), _decode(args[1]))
        if head == ABS and len(args) == 2:
            var = _decode(args[0])
            if not isinstance(var, Var):
                raise NotAConstruction("abs expects the construction of a variable first")
            return Abs(var, _decode(args[1]))
        if head == COND and len(args) == 3:
            return Cond(_decode(args[0]), _decode(args[1]), _decode(args[2]))
        if head == QUO and len(args) == 1:
            return Quote(_decode(args[0]))
    except NotAConstruction:
        raise
    except CttError as exc:
        raise NotAConstruction(f"ill-typed construction: {exc}") from exc
    raise NotAConstruction("not in the range of the encoder")


def _spine(e):
    args = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fun
    args.reverse()
    return e, args


def as_construction(c) -> Construction:
    if isinstance(c, Construction):
        return c
    return Construction(decode(c))


def is_construction(e: Expr) -> bool:
    try:
        decode(e)
    except NotAConstruction:
        return False
    return True


# ---------------------------------------------------------------- predicates


def is_var(c) -> bool:
    return isinstance(as_construction(c).decoded, Var)


def is_var_at(ty, c) -> bool:
    d = as_construction(c).decoded
    return isinstance(d, Var) and d.ty == ty


def is_con(c) -> bool:
    return isinstance(as_construction(c).decoded, Const)


def is_con_at(ty, c) -> bool:
    d = as_construction(c).decoded
    return isinstance(d, Const) and d.ty == ty


def is_expr_at(ty, c) -> bool:
    return as_construction(c).decoded.ty == ty


def proper_subexpr(c1, c2) -> bool:
    """True iff the expression represented by ``c1`` occurs strictly inside the
    expression represented by ``c2`` (quotation contents and binders count)."""
    a = as_construction(c1).decoded
    b = as_construction(c2).decoded
    if a == b:
        return False
    return any(s == a for s in subexpressions(b))


def is_free_in(c1, c2) -> bool:
    a = as_construction(c1).decoded
    if not isinstance(a, Var):
        return False
    return a in free_vars(as_construction(c2).decoded)
