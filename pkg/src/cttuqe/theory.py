"""Languages, theories, normality and definitional extension."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import (
    DuplicateConstant,
    NotAFormula,
    NotInLanguage,
    NotSemanticallyClosed,
    TypeMismatch,
    UnknownBaseType,
)
from .syntax import (
    EPS,
    LOGICAL_BASES,
    O,
    Arrow,
    Const,
    Expr,
    base_names,
    free_vars,
    is_eval_free,
    subexpressions,
    type_components,
    type_key,
    types_of,
)
from .sugar import eq


@dataclass(frozen=True)
class Theory:
    """An immutable theory: base types, declared constants and closed axioms.

    ``definitions`` pairs a defined constant with its defining expression;
    the corresponding ``c = defn`` formula is also among the axioms.
    """

    name: str
    bases: Tuple[str, ...] = ()
    consts: Tuple[Const, ...] = ()
    axioms: Tuple[Expr, ...] = ()
    definitions: Tuple[Tuple[Const, Expr], ...] = ()
    _index: Dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        bases = tuple(dict.fromkeys(("o", "eps") + tuple(self.bases)))
        object.__setattr__(self, "bases", bases)
        index: Dict[str, List[Const]] = {}
        for c in self.consts:
            for b in base_names(c.ty):
                if b not in bases:
                    raise UnknownBaseType(f"constant {c.name} uses unknown base type {b}")
            if c.is_logical:
                raise DuplicateConstant(f"{c.name} is a logical constant")
            same = index.setdefault(c.name, [])
            if any(d.ty == c.ty for d in same):
                raise DuplicateConstant(f"{c.name} : {c.ty} is declared twice")
            same.append(c)
        object.__setattr__(self, "_index", index)

    # ------------------------------------------------------------- lookup

    def consts_named(self, name: str) -> List[Const]:
        return list(self._index.get(name, ()))

    def lookup(self, name: str, ty=None) -> Optional[Const]:
        for c in self._index.get(name, ()):
            if ty is None or c.ty == ty:
                return c
        return None

    def declares(self, c: Const) -> bool:
        return any(d.ty == c.ty for d in self._index.get(c.name, ()))

    @property
    def user_bases(self) -> Tuple[str, ...]:
        return tuple(b for b in self.bases if b not in LOGICAL_BASES)

    def definition_of(self, c: Const) -> Optional[Expr]:
        for d, e in self.definitions:
            if d == c:
                return e
        return None

    # ------------------------------------------------------------- building

    def with_bases(self, *names: str) -> "Theory":
        return replace(self, bases=self.bases + tuple(names))

    def with_consts(self, *consts: Const) -> "Theory":
        return replace(self, consts=self.consts + tuple(consts))

    def renamed(self, name: str) -> "Theory":
        return replace(self, name=name)


def language_contains(t: Theory, e: Expr) -> bool:
    for s in subexpressions(e):
        if not base_names(s.ty) <= set(t.bases):
            return False
        if isinstance(s, Const):
            if s.index is not None and not base_names(s.index) <= set(t.bases):
                return False
            if not s.is_logical and not t.declares(s):
                return False
    return True


def check_normal(t: Theory, a: Expr) -> None:
    """Raise unless ``a`` may be an axiom of ``t``."""
    if a.ty != O:
        raise NotAFormula(f"axioms must have type o, not {a.ty}")
    if not language_contains(t, a):
        raise NotInLanguage("axiom uses a base type or constant outside the language")
    if not is_eval_free(a):
        raise NotSemanticallyClosed(
            "axioms containing evaluations are rejected (closed eval-free formulas only)"
        )
    if free_vars(a):
        names = ", ".join(sorted(f"{v.name}:{v.ty}" for v in free_vars(a)))
        raise NotSemanticallyClosed(f"axiom has free variables: {names}")


def add_axiom(t: Theory, a: Expr) -> Theory:
    check_normal(t, a)
    return replace(t, axioms=t.axioms + (a,))


def definitional_extension(t: Theory, c, ty=None, defn: Expr = None) -> Theory:
    """Add constant ``c : ty`` with axiom ``c = defn``.

    ``c`` may be a name (with ``ty`` given) or a ready :class:`Const`.
    """
    const = c if isinstance(c, Const) else Const(c, ty)
    if t.declares(const):
        raise DuplicateConstant(f"{const.name} : {const.ty} is already declared")
    if defn.ty != const.ty:
        raise TypeMismatch(f"definition of {const.name} has type {defn.ty}, expected {const.ty}")
    if not language_contains(t, defn):
        raise NotInLanguage(f"definition of {const.name} is outside the language")
    if not is_eval_free(defn) or free_vars(defn):
        raise NotSemanticallyClosed(f"definition of {const.name} must be closed and eval-free")
    extended = t.with_consts(const)
    axiom = eq(const, defn)
    check_normal(extended, axiom)
    return replace(
        extended,
        axioms=extended.axioms + (axiom,),
        definitions=extended.definitions + ((const, defn),),
    )


def _close(types: Iterable) -> set:
    out = set()
    for ty in types:
        out.update(type_components(ty))
    return out


def occurring_types(t: Theory) -> List:
    """Types of all subexpressions of axioms and of declared constants,
    closed under arrow components, plus o and eps.  Sorted deterministically."""
    found = {O, EPS}
    for c in t.consts:
        found.add(c.ty)
    for a in t.axioms:
        found |= types_of(a)
    return sorted(_close(found), key=type_key)


def make_theory(
    name: str,
    bases: Iterable[str] = (),
    consts: Iterable[Const] = (),
    axioms: Iterable[Expr] = (),
) -> Theory:
    t = Theory(name, tuple(bases), tuple(consts))
    for a in axioms:
        t = add_axiom(t, a)
    return t
