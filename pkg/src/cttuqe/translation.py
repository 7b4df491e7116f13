"""Translations between theories, their canonical extensions, obligation
generation, and elaboration of non-injective pre-translations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import (
    CttError,
    MissingConstantMapping,
    NameCollision,
    NotAPredicate,
    NotInSourceLanguage,
    TypeMismatch,
    UnknownBaseType,
)
from .sugar import TRUE, FALSE, and_, bottom, eq, exists, forall, implies, not_, quasi_eq
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
    Expr,
    Quote,
    Var,
    arrow,
    base_names,
    eq_const,
    free_vars,
    iota_const,
    is_eval_free,
    type_components,
    type_key,
)
from .theory import Theory, definitional_extension, language_contains, occurring_types

MAX_PRIMES = 16


def true_pred(ty) -> Abs:
    """The trivially true predicate ``\\x:ty. T``."""
    return Abs(Var("x", ty), TRUE)


def is_true_pred(p: Expr) -> bool:
    return isinstance(p, Abs) and p.body == TRUE


def tau(p: Expr):
    if not (isinstance(p.ty, Arrow) and p.ty.cod == O):
        raise NotAPredicate(f"expected a predicate, got an expression of type {p.ty}")
    return p.ty.dom


def arrow_pred(p: Expr, q: Expr, guard: str = "defined") -> Abs:
    """The predicate ``p -> q`` on functions from tau(p) to tau(q).

    With ``guard="defined"`` (the default) a point ``x`` is constrained only
    where ``f x`` is not quasi-equal to bottom.  ``guard="literal"`` uses the
    plain disequation ``f x /= bot`` instead; see the decisions ledger for why
    that form is unusable when the codomain is not o.
    """
    a, b = tau(p), tau(q)
    f = Var("f", Arrow(a, b))
    x = Var("x", a)
    fx = App(f, x)
    if guard == "defined":
        g = not_(quasi_eq(fx, bottom(b)))
    elif guard == "literal":
        g = not_(eq(fx, bottom(b)))
    else:
        raise ValueError(f"unknown guard {guard!r}")
    return Abs(f, forall(x, implies(g, and_(App(p, x), App(q, fx)))))


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.message}"


@dataclass(frozen=True)
class Obligation:
    group: int
    subject: object
    formula: Expr

    @property
    def subject_text(self) -> str:
        s = self.subject
        if isinstance(s, Const):
            if s.index is None:
                return f"{s.name}:{s.ty}"
            return f"{s.name}@{s.index}" if isinstance(s.index, Base) else f"{s.name}@({s.index})"
        return str(s)


@dataclass
class Translation:
    """A pair (mu, nu) from ``source`` to ``target``.

    ``nu`` lists explicit images of non-logical source constants; a constant
    left out maps to the target constant of the same name at the translated
    type.  ``nu_eq``/``nu_iota`` give images of ``=`` and ``iota`` at source
    types; ``eq_family``/``iota_family`` name an overloaded target constant
    used at every other type whose predicate is not trivially true.
    Variables map to the same name at the translated type.
    """

    source: Theory
    target: Theory
    mu: Dict[str, Expr]
    nu: Dict[Const, Const] = field(default_factory=dict)
    nu_eq: Dict[object, Const] = field(default_factory=dict)
    nu_iota: Dict[object, Const] = field(default_factory=dict)
    eq_family: Optional[str] = None
    iota_family: Optional[str] = None
    name: str = "translation"

    def __post_init__(self):
        self.mu = dict(self.mu)
        self.mu.setdefault("o", true_pred(O))
        self.mu.setdefault("eps", true_pred(EPS))
        self._mu_bar: Dict = {}
        self._tau: Dict = {}

    # ------------------------------------------------------------ types

    def mu_bar(self, ty) -> Expr:
        out = self._mu_bar.get(ty)
        if out is None:
            if isinstance(ty, Base):
                if ty.name not in self.mu:
                    raise UnknownBaseType(f"no predicate given for base type {ty.name}")
                out = self.mu[ty.name]
            else:
                out = arrow_pred(self.mu_bar(ty.dom), self.mu_bar(ty.cod))
            self._mu_bar[ty] = out
        return out

    def tau_mu(self, ty):
        """tau(mu_bar(ty)), computed structurally."""
        out = self._tau.get(ty)
        if out is None:
            if isinstance(ty, Base):
                out = tau(self.mu_bar(ty))
            else:
                out = Arrow(self.tau_mu(ty.dom), self.tau_mu(ty.cod))
            self._tau[ty] = out
        return out

    def is_trivial(self, ty) -> bool:
        """True iff every base of ``ty`` is sent to a trivially true predicate."""
        return all(is_true_pred(self.mu_bar(Base(b))) for b in base_names(ty))

    # ------------------------------------------------------------ constants

    def nu_const(self, c: Const) -> Const:
        if c.is_logical:
            return self._nu_logical(c)
        if c in self.nu:
            return self.nu[c]
        if not self.source.declares(c):
            raise NotInSourceLanguage(f"{c.name} : {c.ty} is not a constant of {self.source.name}")
        img = self.target.lookup(c.name, self.tau_mu(c.ty))
        if img is None:
            raise MissingConstantMapping(f"no image given for {c.name} : {c.ty}")
        return img

    def _nu_logical(self, c: Const) -> Const:
        if c.name == "=":
            return self.nu_eq_at(c.ty.dom)
        if c.name == "iota":
            return self.nu_iota_at(c.ty.cod)
        if c.index is not None:
            return Const(c.name, c.ty, index=self.tau_mu(c.index))
        return c

    def nu_eq_at(self, ty) -> Const:
        if ty in self.nu_eq:
            return self.nu_eq[ty]
        t2 = self.tau_mu(ty)
        if self.is_trivial(ty):
            return eq_const(t2)
        if self.eq_family is not None:
            return Const(self.eq_family, arrow(t2, t2, O))
        raise MissingConstantMapping(f"no image given for = at type {ty}")

    def nu_iota_at(self, ty) -> Const:
        if ty in self.nu_iota:
            return self.nu_iota[ty]
        t2 = self.tau_mu(ty)
        if self.is_trivial(ty):
            return iota_const(t2)
        if self.iota_family is not None:
            return Const(self.iota_family, Arrow(Arrow(t2, O), t2))
        raise MissingConstantMapping(f"no image given for iota at type {ty}")

    # ------------------------------------------------------------ expressions

    def nu_bar(self, e: Expr) -> Expr:
        return _NuBar(self)(e)

    def eq_rhs(self, ty) -> Expr:
        t2 = self.tau_mu(ty)
        x, y = Var("x", t2), Var("y", t2)
        p = self.mu_bar(ty)
        return Abs(x, Abs(y, Cond(and_(App(p, x), App(p, y)), eq(x, y), FALSE)))

    def iota_rhs(self, ty) -> Expr:
        t2 = self.tau_mu(ty)
        x = Var("x", Arrow(t2, O))
        return Abs(x, Cond(App(self.mu_bar(Arrow(ty, O)), x), App(iota_const(t2), x), bottom(t2)))


class _NuBar:
    def __init__(self, t: Translation):
        self.t = t
        self.memo: Dict[Expr, Expr] = {}

    def __call__(self, e):
        out = self.memo.get(e)
        if out is None:
            out = self.memo[e] = self._go(e)
        return out

    def _check_type(self, ty):
        missing = base_names(ty) - set(self.t.source.bases)
        if missing:
            raise NotInSourceLanguage(f"base type {sorted(missing)[0]} is not in {self.t.source.name}")

    def _go(self, e):
        t = self.t
        self._check_type(e.ty)
        if isinstance(e, Var):
            return Var(e.name, t.tau_mu(e.ty))
        if isinstance(e, Const):
            if e.index is not None:
                self._check_type(e.index)
            return t.nu_const(e)
        if isinstance(e, App):
            return App(self(e.fun), self(e.arg))
        if isinstance(e, Abs):
            x = self(e.var)
            guard = App(t.mu_bar(e.var.ty), x)
            return Abs(x, Cond(guard, self(e.body), bottom(t.tau_mu(e.body.ty))))
        if isinstance(e, Cond):
            return Cond(self(e.test), self(e.then), self(e.orelse))
        if isinstance(e, Quote):
            return Quote(self(e.body))
        if isinstance(e, Eval):
            return Eval(self(e.code), self(e.witness))
        raise TypeError(f"not an expression: {e!r}")


def tau_of(p):
    return tau(p)


def mu_bar(t: Translation, ty) -> Expr:
    return t.mu_bar(ty)


def nu_bar(t: Translation, e: Expr) -> Expr:
    return t.nu_bar(e)


# ---------------------------------------------------------------- checking


def _closed_types(types: Iterable) -> List:
    out = set()
    for ty in types:
        out.update(type_components(ty))
    return sorted(out, key=type_key)


def default_types(t: Translation, extra: Iterable = ()) -> List:
    return _closed_types(list(occurring_types(t.source)) + list(extra))


def check_translation(t: Translation, types: Optional[Iterable] = None) -> List[Diagnostic]:
    """All violations of the translation conditions, as diagnostics."""
    diags: List[Diagnostic] = []
    add = lambda code, msg: diags.append(Diagnostic(code, msg))
    src, tgt = t.source, t.target

    for name, cond in (("o", "condition-1"), ("eps", "condition-2")):
        p = t.mu.get(name)
        want = Base(name)
        if not (is_true_pred(p) and p.ty == Arrow(want, O)):
            add(cond, f"mu({name}) must be \\x:{name}. T")
    for b in src.bases:
        if b not in t.mu:
            add("mu-total", f"mu is undefined on base type {b}")
    for b, p in t.mu.items():
        if b not in src.bases:
            add("mu-domain", f"mu is given for {b}, which is not a base type of {src.name}")
            continue
        if not (isinstance(p.ty, Arrow) and p.ty.cod == O):
            add("mu-predicate", f"mu({b}) is not a predicate")
        elif not is_eval_free(p) or free_vars(p):
            add("mu-closed", f"mu({b}) must be closed and eval-free")
        elif not language_contains(tgt, p):
            add("mu-language", f"mu({b}) is not in the language of {tgt.name}")
    if diags:
        return diags

    types = default_types(t) if types is None else _closed_types(types)

    # type translation must be injective, else distinct variables collide
    seen_ty: Dict = {}
    for ty in types:
        img = t.tau_mu(ty)
        if img in seen_ty and seen_ty[img] != ty:
            add("variables", f"variables of types {seen_ty[img]} and {ty} both map to type {img}")
        seen_ty.setdefault(img, ty)

    images: Dict[Const, str] = {}

    def claim(img, who):
        if img in images:
            add("injectivity", f"nu is not injective: {images[img]} and {who} both map to {_show_const(img)}")
        else:
            images[img] = who

    for c in t.nu:
        if not src.declares(c):
            add("nu-domain", f"{_show_const(c)} is not a constant of {src.name}")
    for c in src.consts:
        try:
            img = t.nu_const(c)
        except CttError as exc:
            add("nu-total", str(exc))
            continue
        want = t.tau_mu(c.ty)
        if not isinstance(img, Const):
            add("condition-4", f"nu({c.name}) is not a constant")
            continue
        if img.ty != want:
            add("condition-4", f"nu({c.name}) has type {img.ty}, expected {want}")
        if img.is_logical or not tgt.declares(img):
            add("condition-4", f"nu({c.name}) = {_show_const(img)} is not a declared constant of {tgt.name}")
        claim(img, _show_const(c))

    for ty in types:
        for kind, get, applies in (
            ("=", t.nu_eq_at, True),
            ("iota", t.nu_iota_at, ty != O),
        ):
            if not applies:
                continue
            try:
                img = get(ty)
            except CttError as exc:
                add("nu-total", str(exc))
                continue
            t2 = t.tau_mu(ty)
            want = arrow(t2, t2, O) if kind == "=" else Arrow(Arrow(t2, O), t2)
            if img.ty != want:
                add("condition-4", f"nu({kind} at {ty}) has type {img.ty}, expected {want}")
            if not img.is_logical and not tgt.declares(img):
                add("condition-4", f"nu({kind} at {ty}) = {_show_const(img)} is not declared in {tgt.name}")
            claim(img, f"{kind}@{ty}")
        for fam in INDEXED_FAMILIES:
            claim(Const(fam, Arrow(EPS, O), index=t.tau_mu(ty)), f"{fam}@{ty}")
    for name, ty in EPS_CONSTANT_TYPES.items():
        claim(Const(name, ty), name)
    return diags


def _show_const(c: Const) -> str:
    if c.index is not None:
        return f"{c.name}@{c.index}"
    return f"{c.name}:{c.ty}"


# ---------------------------------------------------------------- obligations

GROUP_NAMES = {
    1: "nonempty carriers",
    2: "constants respect predicates",
    3: "equality",
    4: "definite description",
    5: "fixed eps constants",
    6: "indexed families",
    7: "translated axioms",
}


def obligations(
    t: Translation, types: Optional[Iterable] = None, pedantic: bool = False
) -> List[Obligation]:
    """The seven obligation groups, with type-indexed groups finitized to ``types``
    (default: the types occurring in the source theory)."""
    src = t.source
    types = default_types(t) if types is None else _closed_types(types)
    for ty in types:
        missing = base_names(ty) - set(src.bases)
        if missing:
            raise UnknownBaseType(f"type {ty} uses base types outside {src.name}")
    out: List[Obligation] = []

    bases = src.bases if pedantic else src.user_bases
    for b in bases:
        p = t.mu[b]
        x = Var("x", tau(p))
        out.append(Obligation(1, b, exists(x, App(p, x))))

    for c in src.consts:
        out.append(Obligation(2, c, App(t.mu_bar(c.ty), t.nu_const(c))))

    for ty in types:
        out.append(Obligation(3, ty, eq(t.nu_eq_at(ty), t.eq_rhs(ty))))

    for ty in types:
        if ty != O:
            rhs = t.iota_rhs(ty)
            out.append(Obligation(4, ty, eq(t.nu_iota_at(ty), rhs)))

    for name, ty in EPS_CONSTANT_TYPES.items():
        c = Const(name, ty)
        out.append(Obligation(5, c, eq(t.nu_const(c), c)))

    for ty in types:
        for fam in INDEXED_FAMILIES:
            c = Const(fam, Arrow(EPS, O), index=ty)
            target = Const(fam, Arrow(EPS, O), index=t.tau_mu(ty))
            out.append(Obligation(6, c, eq(t.nu_const(c), target)))

    for k, a in enumerate(src.axioms, 1):
        out.append(Obligation(7, f"axiom {k}", t.nu_bar(a)))
    return out


# ---------------------------------------------------------------- pre-translations


def _fresh(base: str, taken) -> str:
    name = base
    for _ in range(MAX_PRIMES):
        name += "'"
        if name not in taken:
            return name
    raise NameCollision(f"could not find a fresh name for {base}")


def elaborate_pretranslation(
    source: Theory,
    target: Theory,
    pre_mu: Mapping[str, object],
    pre_nu: Mapping[Const, Expr],
    types: Optional[Iterable] = None,
    name: Optional[str] = None,
) -> Tuple[Theory, Translation]:
    """Turn a possibly non-injective draft mapping into a definitional extension
    of ``target`` and a translation into it.

    ``pre_mu`` values may be types (lifted to trivially true predicates) or
    predicates.  ``pre_nu`` values may be arbitrary closed expressions; any
    image that is not a constant, or is a constant already taken, gets a fresh
    primed constant defined to be equal to it.
    """
    mu = {}
    for b, v in pre_mu.items():
        mu[b] = v if isinstance(v, Expr) else true_pred(v)
    draft = Translation(source, target, mu)
    taken = {c.name for c in target.consts}
    ext = target
    nu: Dict[Const, Const] = {}
    used = set()

    for c in source.consts:
        want = draft.tau_mu(c.ty)
        if c in pre_nu:
            img = pre_nu[c]
        else:
            img = target.lookup(c.name, want)
            if img is None:
                raise MissingConstantMapping(f"no image given for {c.name} : {c.ty}")
        if img.ty != want:
            raise TypeMismatch(f"image of {c.name} has type {img.ty}, expected {want}")
        if isinstance(img, Const) and not img.is_logical and img not in used and ext.declares(img):
            nu[c] = img
            used.add(img)
            continue
        stem = img.name if isinstance(img, Const) and not img.is_logical else c.name
        fresh = _fresh(stem, taken)
        taken.add(fresh)
        ext = definitional_extension(ext, fresh, want, img)
        new = Const(fresh, want)
        nu[c] = new
        used.add(new)

    types = default_types(draft) if types is None else _closed_types(types)
    heavy = [ty for ty in types if not draft.is_trivial(ty)]
    eq_family = iota_family = None
    if heavy:
        eq_family = _fresh("eq", taken)
        taken.add(eq_family)
        iota_family = _fresh("iota", taken)
        taken.add(iota_family)
        for ty in heavy:
            t2 = draft.tau_mu(ty)
            ext = definitional_extension(ext, eq_family, arrow(t2, t2, O), draft.eq_rhs(ty))
        for ty in heavy:
            if ty != O:
                t2 = draft.tau_mu(ty)
                ext = definitional_extension(
                    ext, iota_family, Arrow(Arrow(t2, O), t2), draft.iota_rhs(ty)
                )
    if ext is not target:
        ext = ext.renamed(name or f"{target.name}_bar")
    trans = Translation(
        source,
        ext,
        mu,
        nu=nu,
        eq_family=eq_family,
        iota_family=iota_family,
        name=f"{source.name}_to_{ext.name}",
    )
    return ext, trans
