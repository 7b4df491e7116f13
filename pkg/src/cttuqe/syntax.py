"""Types, intrinsically typed expressions and binding analysis.

Expressions are immutable trees with a cached type on every node.  There is
no alpha-conversion anywhere: bound-variable names are observable through
quotation, so equality is plain structural equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterator, Optional

from .errors import NotEvalFree, QuoteNotEvalFree, TypeMismatch


# --------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Arrow:
    dom: "Type"
    cod: "Type"

    def __str__(self):
        dom = f"({self.dom})" if isinstance(self.dom, Arrow) else str(self.dom)
        return f"{dom} -> {self.cod}"


Type = (Base, Arrow)

O = Base("o")
EPS = Base("eps")
LOGICAL_BASES = frozenset({"o", "eps"})


def arrow(*types):
    """Right-associated function type: ``arrow(a, b, c)`` is ``a -> b -> c``."""
    if len(types) == 1:
        return types[0]
    return Arrow(types[0], arrow(*types[1:]))


def is_predicate_type(ty) -> bool:
    return isinstance(ty, Arrow) and ty.cod == O


def base_names(ty) -> FrozenSet[str]:
    if isinstance(ty, Base):
        return frozenset({ty.name})
    return base_names(ty.dom) | base_names(ty.cod)


def type_components(ty) -> Iterator:
    """Yield ``ty`` and all argument/result components, recursively."""
    yield ty
    if isinstance(ty, Arrow):
        yield from type_components(ty.dom)
        yield from type_components(ty.cod)


def type_size(ty) -> int:
    if isinstance(ty, Base):
        return 1
    return 1 + type_size(ty.dom) + type_size(ty.cod)


def type_key(ty):
    """Deterministic sort key for types (smaller types first)."""
    return (type_size(ty), str(ty))


# --------------------------------------------------------------------------
# logical constants (schematic signature)

EPS_CONSTANT_TYPES = {
    "is-var": arrow(EPS, O),
    "is-con": arrow(EPS, O),
    "app": arrow(EPS, EPS, EPS),
    "abs": arrow(EPS, EPS, EPS),
    "cond": arrow(EPS, EPS, EPS, EPS),
    "quo": arrow(EPS, EPS),
    "sub": arrow(EPS, EPS, O),
    "is-free-in": arrow(EPS, EPS, O),
}
INDEXED_FAMILIES = ("is-var", "is-con", "is-expr")
LOGICAL_NAMES = frozenset({"=", "iota", "is-expr"} | set(EPS_CONSTANT_TYPES))


def logical_type(name: str, index=None, at=None):
    """Type of a logical constant instance.

    ``index`` selects members of the is-var/is-con/is-expr families; ``at``
    is the type parameter of ``=`` (its argument type) and ``iota`` (its
    result type).
    """
    if name == "=":
        return arrow(at, at, O)
    if name == "iota":
        if at == O:
            raise TypeMismatch("iota is not available at type o")
        return arrow(arrow(at, O), at)
    if index is not None:
        if name not in INDEXED_FAMILIES:
            raise TypeMismatch(f"{name} has no indexed family")
        return arrow(EPS, O)
    if name not in EPS_CONSTANT_TYPES:
        raise TypeMismatch(f"{name} needs a type index")
    return EPS_CONSTANT_TYPES[name]


# --------------------------------------------------------------------------
# expressions


class Expr:
    """Base class of the seven expression formers."""

    __slots__ = ("ty", "_hash")

    def _fields(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._fields() == other._fields()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((type(self).__name__,) + self._fields())
        return h

    def __repr__(self):
        from .printer import print_expr

        return f"<{type(self).__name__} {print_expr(self)} : {self.ty}>"

    def children(self) -> tuple:
        return ()


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str, ty):
        if not isinstance(ty, Type):
            raise TypeMismatch(f"not a type: {ty!r}")
        self.name = name
        self.ty = ty
        self._hash = None

    def _fields(self):
        return (self.name, self.ty)


class Const(Expr):
    __slots__ = ("name", "index")

    def __init__(self, name: str, ty, index=None):
        if not isinstance(ty, Type):
            raise TypeMismatch(f"not a type: {ty!r}")
        if name in LOGICAL_NAMES:
            _check_logical(name, ty, index)
        elif index is not None:
            raise TypeMismatch(f"non-logical constant {name} cannot carry an index")
        self.name = name
        self.ty = ty
        self.index = index
        self._hash = None

    def _fields(self):
        return (self.name, self.ty, self.index)

    @property
    def is_logical(self) -> bool:
        return self.name in LOGICAL_NAMES


def _check_logical(name, ty, index):
    if name == "=":
        ok = (
            index is None
            and isinstance(ty, Arrow)
            and isinstance(ty.cod, Arrow)
            and ty.dom == ty.cod.dom
            and ty.cod.cod == O
        )
    elif name == "iota":
        ok = (
            index is None
            and isinstance(ty, Arrow)
            and ty.dom == Arrow(ty.cod, O)
            and ty.cod != O
        )
    elif name == "is-expr":
        ok = index is not None and ty == arrow(EPS, O)
    elif name in INDEXED_FAMILIES and index is not None:
        ok = ty == arrow(EPS, O)
    else:
        ok = index is None and ty == EPS_CONSTANT_TYPES[name]
    if not ok:
        suffix = f"@{index}" if index is not None else ""
        raise TypeMismatch(f"logical constant {name}{suffix} cannot have type {ty}")


class App(Expr):
    __slots__ = ("fun", "arg")

    def __init__(self, fun: Expr, arg: Expr):
        fty = fun.ty
        if not isinstance(fty, Arrow) or fty.dom != arg.ty:
            raise TypeMismatch(f"cannot apply a function of type {fty} to an argument of type {arg.ty}")
        self.fun = fun
        self.arg = arg
        self.ty = fty.cod
        self._hash = None

    def _fields(self):
        return (self.fun, self.arg)

    def children(self):
        return (self.fun, self.arg)


class Abs(Expr):
    __slots__ = ("var", "body")

    def __init__(self, var: Var, body: Expr):
        if not isinstance(var, Var):
            raise TypeMismatch("abstraction binder must be a variable")
        self.var = var
        self.body = body
        self.ty = Arrow(var.ty, body.ty)
        self._hash = None

    def _fields(self):
        return (self.var, self.body)

    def children(self):
        return (self.var, self.body)


class Cond(Expr):
    __slots__ = ("test", "then", "orelse")

    def __init__(self, test: Expr, then: Expr, orelse: Expr):
        if test.ty != O:
            raise TypeMismatch(f"conditional test has type {test.ty}, expected o")
        if then.ty != orelse.ty:
            raise TypeMismatch(f"conditional branches differ: {then.ty} vs {orelse.ty}")
        self.test = test
        self.then = then
        self.orelse = orelse
        self.ty = then.ty
        self._hash = None

    def _fields(self):
        return (self.test, self.then, self.orelse)

    def children(self):
        return (self.test, self.then, self.orelse)


class Quote(Expr):
    __slots__ = ("body",)

    def __init__(self, body: Expr):
        if not is_eval_free(body):
            raise QuoteNotEvalFree("only eval-free expressions can be quoted")
        self.body = body
        self.ty = EPS
        self._hash = None

    def _fields(self):
        return (self.body,)

    def children(self):
        return (self.body,)


class Eval(Expr):
    __slots__ = ("code", "witness")

    def __init__(self, code: Expr, witness: Expr):
        if code.ty != EPS:
            raise TypeMismatch(f"evaluated code has type {code.ty}, expected eps")
        self.code = code
        self.witness = witness
        self.ty = witness.ty
        self._hash = None

    def _fields(self):
        return (self.code, self.witness)

    def children(self):
        return (self.code, self.witness)


mk_var = Var
mk_const = Const
mk_app = App
mk_abs = Abs
mk_cond = Cond
mk_quote = Quote
mk_eval = Eval


def apply(fun: Expr, *args: Expr) -> Expr:
    for a in args:
        fun = App(fun, a)
    return fun


def eq_const(ty) -> Const:
    """The equality constant comparing values of type ``ty``."""
    return Const("=", arrow(ty, ty, O))


def iota_const(ty) -> Const:
    return Const("iota", arrow(arrow(ty, O), ty))


def type_of(e: Expr):
    return e.ty


# --------------------------------------------------------------------------
# analysis

_EVAL_FREE_CACHE: dict = {}


def is_eval_free(e: Expr) -> bool:
    if isinstance(e, (Var, Const)):
        return True
    if isinstance(e, Eval):
        return False
    if isinstance(e, Quote):
        # quote bodies are checked on construction
        return True
    cached = _EVAL_FREE_CACHE.get(e)
    if cached is None:
        cached = all(is_eval_free(c) for c in e.children())
        if len(_EVAL_FREE_CACHE) > 200_000:
            _EVAL_FREE_CACHE.clear()
        _EVAL_FREE_CACHE[e] = cached
    return cached


def free_vars(e: Expr) -> FrozenSet[Var]:
    """Variables with at least one free occurrence in an eval-free ``e``.

    Occurrences inside a quotation are neither free nor bound.
    """
    if not is_eval_free(e):
        raise NotEvalFree("free variables are only defined for eval-free expressions")
    return _free(e)


def _free(e):
    if isinstance(e, Var):
        return frozenset({e})
    if isinstance(e, (Const, Quote)):
        return frozenset()
    if isinstance(e, Abs):
        return _free(e.body) - {e.var}
    out = frozenset()
    for c in e.children():
        out |= _free(c)
    return out


def is_closed(e: Expr) -> bool:
    return not free_vars(e)


def syntactic_free_vars(e: Expr) -> FrozenSet[Var]:
    """Like :func:`free_vars` but treats evaluations as ordinary nodes.

    Used only by the model checker to pick the variables it quantifies over.
    """
    if isinstance(e, Var):
        return frozenset({e})
    if isinstance(e, (Const, Quote)):
        return frozenset()
    if isinstance(e, Abs):
        return syntactic_free_vars(e.body) - {e.var}
    out = frozenset()
    for c in e.children():
        out |= syntactic_free_vars(c)
    return out


def subexpressions(e: Expr) -> Iterator[Expr]:
    """Every subexpression occurrence of ``e`` (pre-order), including binders
    and the contents of quotations."""
    stack = [e]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(reversed(cur.children()))


def constants_of(e: Expr) -> FrozenSet[Const]:
    return frozenset(s for s in subexpressions(e) if isinstance(s, Const))


def types_of(e: Expr) -> FrozenSet:
    return frozenset(s.ty for s in subexpressions(e))


def depth(e: Expr) -> int:
    kids = e.children()
    if not kids:
        return 1
    return 1 + max(depth(c) for c in kids)
