"""Finite standard models and the partial valuation function.

Values
------
Truth values are Python booleans, individuals are :class:`Indiv`, values of
type eps are :class:`~cttuqe.quotation.Construction`, and functions are one of
:class:`Table` (explicit graphs), :class:`Closure` (a lambda plus its
assignment, applied on demand) or :class:`Builtin` (logical constants).
``UNDEFINED`` marks the absence of a value.

Large domains
-------------
Functions over eps, and over function types whose standard domain is too big
to enumerate, are compared through an opaque :class:`Generic` element.  Any
question whose answer depends on what a generic element really is (is it a
variable, what does it map x to, is it equal to y) is answered by an
:class:`Oracle` choice.  :func:`check_formula` replays the evaluation over
every combination of choices.  A formula is reported valid only if every
combination yields T, and refuted only when the evaluation needed no
choices at all; otherwise the verdict is ``undecided``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import EpsEnumeration, ModelError, NotInLanguage, Undecided
from .quotation import (
    Construction,
    is_free_in,
    proper_subexpr,
)
from .sugar import AND_FN, IMPLIES_FN, OR_FN, TRUE, recognize, SugarForm
from .syntax import (
    EPS,
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
    free_vars,
    is_eval_free,
    syntactic_free_vars,
)
from .theory import Theory, language_contains

DOMAIN_BUDGET = 256
CHOICE_LIMIT = 64
MAX_RUNS = 20000


# ---------------------------------------------------------------- values


class _Undefined:
    __slots__ = ()

    def __repr__(self):
        return "UNDEFINED"

    def __bool__(self):
        raise TypeError("UNDEFINED has no truth value")


UNDEFINED = _Undefined()


def is_defined(v) -> bool:
    return v is not UNDEFINED


@dataclass(frozen=True)
class Indiv:
    base: str
    index: int

    def __repr__(self):
        return str(self.index)


@dataclass(frozen=True)
class Table:
    """A function over an enumerable domain, stored as the tuple of its values
    listed in the model's enumeration order of the domain."""

    ty: Any
    values: Tuple

    def __repr__(self):
        return f"Table[{self.ty}]"


class Closure:
    __slots__ = ("expr", "env", "_free")

    def __init__(self, expr: Abs, env: "Env"):
        self.expr = expr
        self.env = env
        self._free = None

    @property
    def ty(self):
        return self.expr.ty

    def __repr__(self):
        from .printer import print_expr

        return f"Closure({print_expr(self.expr)})"


@dataclass(frozen=True)
class Builtin:
    """A logical constant (or a helper function) applied to ``args``."""

    kind: str
    ty: Any  # type of the partially applied value
    param: Any = None
    args: Tuple = ()

    def __repr__(self):
        p = f"@{self.param}" if self.param is not None else ""
        return f"Builtin({self.kind}{p}, {len(self.args)} args)"


@dataclass(frozen=True)
class Generic:
    """An opaque element of a type too large to enumerate."""

    gid: int
    ty: Any

    def __repr__(self):
        return f"g{self.gid}:{self.ty}"


ARITY = {
    "=": 2,
    "iota": 1,
    "is-var": 1,
    "is-con": 1,
    "is-expr": 1,
    "app": 2,
    "abs": 2,
    "cond": 3,
    "quo": 1,
    "sub": 2,
    "is-free-in": 2,
    "and": 2,
    "or": 2,
    "implies": 2,
    "univ": 1,
    "const": 1,
}


# ---------------------------------------------------------------- assignments


class Env:
    """A persistent assignment; unbound variables get default values."""

    __slots__ = ("var", "value", "parent")

    def __init__(self, var=None, value=None, parent=None):
        self.var = var
        self.value = value
        self.parent = parent

    def bind(self, var, value) -> "Env":
        return Env(var, value, self)

    def lookup(self, var, default):
        e = self
        while e is not None and e.var is not None:
            if e.var == var:
                return e.value
            e = e.parent
        return default(var.ty)

    @classmethod
    def of(cls, mapping: Optional[Dict] = None) -> "Env":
        env = cls()
        for k, v in (mapping or {}).items():
            env = env.bind(k, v)
        return env


EMPTY = Env()


# ---------------------------------------------------------------- oracle


class NeedChoice(Exception):
    pass


class Oracle:
    """Answers questions about generic elements, replaying a fixed prefix of
    choice indices and defaulting to the first option afterwards."""

    def __init__(self, prefix: Sequence[int] = (), enabled: bool = True):
        self.prefix = list(prefix)
        self.taken: List[int] = []
        self.counts: List[int] = []
        self.memo: Dict = {}
        self.enabled = enabled
        self.frozen = 0
        self.gid = 0

    def fresh(self, ty) -> Generic:
        self.gid += 1
        return Generic(self.gid, ty)

    def choose(self, key, options: Sequence):
        if key in self.memo:
            return self.memo[key]
        if not self.enabled or self.frozen:
            raise NeedChoice(key)
        if len(options) == 1:
            self.memo[key] = options[0]
            return options[0]
        pos = len(self.taken)
        idx = self.prefix[pos] if pos < len(self.prefix) else 0
        self.taken.append(idx)
        self.counts.append(len(options))
        value = options[idx]
        self.memo[key] = value
        return value


# ---------------------------------------------------------------- the model


def universal_pred(e: Expr) -> bool:
    """Recognize predicates that hold of every defined value: ``\\x. T`` and
    ``p -> q`` for universal ``p`` and ``q`` (either guard form)."""
    return _universal(e, {})


def _universal(e, memo):
    if e in memo:
        return memo[e]
    ok = False
    if isinstance(e, Abs) and e.body.ty == O:
        if e.body == TRUE:
            ok = True
        else:
            ok = _universal_arrow(e, memo)
    memo[e] = ok
    return ok


def _universal_arrow(e, memo):
    from .translation import arrow_pred

    s = recognize(e.body)
    if s is None or s[0] is not SugarForm.FORALL:
        return False
    s = recognize(s[1][1])
    if s is None or s[0] is not SugarForm.IMPLIES:
        return False
    s = recognize(s[1][1])
    if s is None or s[0] is not SugarForm.AND:
        return False
    pa, qa = s[1]
    if not (isinstance(pa, App) and isinstance(qa, App)):
        return False
    p, q = pa.fun, qa.fun
    if not (_universal(p, memo) and _universal(q, memo)):
        return False
    try:
        return e in (arrow_pred(p, q), arrow_pred(p, q, guard="literal"))
    except Exception:
        return False


class FiniteModel:
    """A finite standard model of ``theory``.

    ``carriers`` gives the size of each non-logical base type; ``interp``
    gives values to the declared constants.  Constants with a definition in
    the theory may be omitted and are then interpreted by their definition.
    """

    def __init__(
        self,
        theory: Theory,
        carriers: Dict[str, int],
        interp: Dict[Const, Any],
        eps_depth: Optional[int] = None,
        symbolic: bool = True,
        budget: int = DOMAIN_BUDGET,
        name: str = "model",
        partial: bool = False,
    ):
        self.theory = theory
        self.carriers = dict(carriers)
        self.eps_depth = eps_depth
        self.symbolic = symbolic
        self.budget = budget
        self.name = name
        for b in theory.user_bases:
            n = self.carriers.get(b)
            if n is None or n < 1:
                raise ModelError(f"base type {b} needs a nonempty carrier")
        for b in self.carriers:
            if b not in theory.user_bases:
                raise ModelError(f"carrier given for unknown base type {b}")
        self._domains: Dict = {}
        self._positions: Dict = {}
        self._universal: Dict = {}
        self._quotes: Dict = {}
        self.interp: Dict[Const, Any] = {}
        defined = {c for c, _ in theory.definitions}
        for c, v in interp.items():
            if not theory.declares(c):
                raise ModelError(f"{c.name} : {c.ty} is not a constant of {theory.name}")
            if not self.inhabits(v, c.ty):
                raise ModelError(f"value given for {c.name} does not inhabit type {c.ty}")
            self.interp[c] = v
        for c in theory.consts:
            if c not in self.interp and c not in defined and not partial:
                raise ModelError(f"no interpretation given for {c.name} : {c.ty}")
        self._defs = {c: d for c, d in theory.definitions if c not in self.interp}

    # ------------------------------------------------------------ domains

    def domain(self, ty) -> Optional[Tuple]:
        """All values of ``ty`` in a fixed order, or None when too many."""
        if ty in self._domains:
            return self._domains[ty]
        if ty == O:
            dom = (True, False)
        elif ty == EPS:
            dom = self._eps_domain() if self.eps_depth is not None else None
        elif isinstance(ty, Base):
            dom = tuple(Indiv(ty.name, k) for k in range(self.carriers[ty.name]))
        else:
            da, db = self.domain(ty.dom), self.domain(ty.cod)
            dom = None
            if da is not None and db is not None:
                outs = list(db) if ty.cod == O else list(db) + [UNDEFINED]
                if len(outs) ** len(da) <= self.budget:
                    dom = tuple(Table(ty, vals) for vals in itertools.product(outs, repeat=len(da)))
        self._domains[ty] = dom
        return dom

    def domain_size(self, ty) -> Optional[int]:
        """Exact size of the standard domain of ``ty`` (None if infinite)."""
        if ty == O:
            return 2
        if ty == EPS:
            return None
        if isinstance(ty, Base):
            return self.carriers[ty.name]
        a, b = self.domain_size(ty.dom), self.domain_size(ty.cod)
        if a is None or b is None:
            return None
        return (b if ty.cod == O else b + 1) ** a

    def _eps_domain(self):
        from .syntax import Var as V

        atoms: List[Expr] = list(self.theory.consts)
        atoms += [V("x", Base(b)) for b in self.theory.bases if b != "eps"]
        level = list(dict.fromkeys(atoms))
        seen = set(level)
        for _ in range(max(0, self.eps_depth - 1)):
            new = []
            for f in level:
                if isinstance(f.ty, Arrow):
                    for a in level:
                        if a.ty == f.ty.dom:
                            new.append(App(f, a))
            for a in level:
                if is_eval_free(a):
                    new.append(Quote(a))
            for n in new:
                if n not in seen:
                    seen.add(n)
                    level.append(n)
        return tuple(Construction(e) for e in level)

    def position(self, ty, value) -> int:
        table = self._positions.get(ty)
        if table is None:
            table = self._positions[ty] = {v: k for k, v in enumerate(self.domain(ty))}
        try:
            return table[value]
        except KeyError:
            raise ModelError(f"value {value!r} is not in the domain of {ty}") from None

    def inhabits(self, v, ty) -> bool:
        if ty == O:
            return isinstance(v, bool)
        if ty == EPS:
            return isinstance(v, Construction)
        if isinstance(ty, Base):
            return isinstance(v, Indiv) and v.base == ty.name and 0 <= v.index < self.carriers.get(ty.name, 0)
        if isinstance(v, Table):
            return v.ty == ty and all(
                (u is UNDEFINED and ty.cod != O) or self.inhabits(u, ty.cod) for u in v.values
            )
        return isinstance(v, (Closure, Builtin, Generic)) and v.ty == ty

    def default(self, ty):
        if ty == O:
            return True
        if ty == EPS:
            return Construction(Var("x", O))
        if isinstance(ty, Base):
            if ty.name not in self.carriers:
                raise NotInLanguage(f"base type {ty.name} has no carrier in this model")
            return Indiv(ty.name, 0)
        return Builtin("const", ty, param=self.default(ty.cod))

    def table(self, ty, fn) -> Table:
        """Build a Table of type ``ty`` from a Python function on the domain."""
        dom = self.domain(ty.dom)
        if dom is None:
            raise ModelError(f"domain of {ty} is too large for an explicit table")
        return Table(ty, tuple(fn(d) for d in dom))

    def apply_table(self, f: Table, d):
        return f.values[self.position(f.ty.dom, d)]

    def indiv(self, base: str, k: int) -> Indiv:
        if not 0 <= k < self.carriers[base]:
            raise ModelError(f"{k} is not an element of the carrier of {base}")
        return Indiv(base, k)

    def interpretation(self, c: Const, ev: "Evaluator"):
        if c in self.interp:
            return self.interp[c]
        d = self._defs.get(c)
        if d is None:
            raise NotInLanguage(f"{c.name} : {c.ty} is not a constant of {self.theory.name}")
        return ev.value(d, EMPTY)

    def is_universal(self, e: Abs) -> bool:
        r = self._universal.get(e)
        if r is None:
            r = self._universal[e] = universal_pred(e)
        return r

    def quote(self, body) -> Construction:
        c = self._quotes.get(body)
        if c is None:
            c = self._quotes[body] = Construction(body)
        return c


# ---------------------------------------------------------------- evaluation


_CONNECTIVES = (AND_FN, OR_FN, IMPLIES_FN)


class Evaluator:
    def __init__(self, model: FiniteModel, oracle: Oracle):
        self.m = model
        self.oracle = oracle
        self._consts: Dict = {}

    # ------------------------------------------------------------ helpers

    def fallback(self, ty):
        return False if ty == O else UNDEFINED

    def fresh(self, ty):
        if not self.m.symbolic:
            raise EpsEnumeration(
                f"cannot enumerate the domain of {ty}; use eps_depth or the symbolic checker"
            )
        return self.oracle.fresh(ty)

    def choose(self, key, ty):
        """A choice for an unknown value of type ``ty`` (possibly undefined)."""
        return self.oracle.choose(key, self.options(ty, partial=ty != O))

    def options(self, ty, partial=True):
        dom = self.m.domain(ty)
        opts: List = [UNDEFINED] if partial else []
        if dom is not None and len(dom) <= CHOICE_LIMIT:
            return opts + list(dom)
        return opts + [self.fresh(ty)]

    # ------------------------------------------------------------ valuation

    def value(self, e: Expr, env: Env):
        if isinstance(e, Var):
            return env.lookup(e, self.m.default)
        if isinstance(e, Const):
            return self.const(e)
        if isinstance(e, App):
            return self.app(e, env)
        if isinstance(e, Abs):
            if self.m.is_universal(e):
                return Builtin("univ", e.ty)
            return Closure(e, env)
        if isinstance(e, Cond):
            return self.value(e.then if self.value(e.test, env) else e.orelse, env)
        if isinstance(e, Quote):
            return self.m.quote(e.body)
        if isinstance(e, Eval):
            return self.eval_node(e, env)
        raise TypeError(f"not an expression: {e!r}")

    def const(self, c: Const):
        v = self._consts.get(c)
        if v is None:
            if c.is_logical:
                if c.name == "=":
                    v = Builtin("=", c.ty, param=c.ty.dom)
                elif c.name == "iota":
                    v = Builtin("iota", c.ty, param=c.ty.cod)
                else:
                    v = Builtin(c.name, c.ty, param=c.index)
            else:
                v = self.m.interpretation(c, self)
            self._consts[c] = v
        return v

    def app(self, e: App, env: Env):
        fun = e.fun
        if isinstance(fun, App):
            head = fun.fun
            if isinstance(head, Abs) and head in _CONNECTIVES:
                a = self.value(fun.arg, env)
                if head == AND_FN:
                    return a and self.value(e.arg, env)
                if head == OR_FN:
                    return a or self.value(e.arg, env)
                return (not a) or self.value(e.arg, env)
        f = self.value(fun, env)
        if f is UNDEFINED:
            return self.fallback(e.ty)
        a = self.value(e.arg, env)
        if a is UNDEFINED:
            return self.fallback(e.ty)
        r = self.apply(f, a)
        return self.fallback(e.ty) if r is UNDEFINED else r

    def eval_node(self, e: Eval, env: Env):
        code = self.value(e.code, env)
        ty = e.witness.ty
        if code is UNDEFINED:
            return self.fallback(ty)
        if isinstance(code, Generic):
            r = self.choose(("eval", code, ty), ty)
            return self.fallback(ty) if r is UNDEFINED else r
        if code.decoded.ty != ty:
            return self.fallback(ty)
        r = self.value(code.decoded, env)
        return self.fallback(ty) if r is UNDEFINED else r

    # ------------------------------------------------------------ application

    def apply(self, f, a):
        if isinstance(f, Closure):
            return self.value(f.expr.body, f.env.bind(f.expr.var, a))
        if isinstance(f, Table):
            if isinstance(a, Generic):
                return self.oracle.choose(("table", f, a), list(dict.fromkeys(f.values)))
            return f.values[self.m.position(f.ty.dom, a)]
        if isinstance(f, Generic):
            return self.choose(("app", f, a), f.ty.cod)
        if isinstance(f, Builtin):
            args = f.args + (a,)
            if len(args) < ARITY[f.kind]:
                return Builtin(f.kind, f.ty.cod, f.param, args)
            return self.builtin(f.kind, f.param, args, f.ty.cod)
        raise ModelError(f"cannot apply {f!r}")

    def builtin(self, kind, param, args, ty):
        if kind == "=":
            return self.equal(args[0], args[1], param)
        if kind == "iota":
            return self.iota(args[0], param)
        if kind == "univ":
            return True
        if kind == "const":
            return param
        if kind in ("and", "or", "implies"):
            a, b = args
            return {"and": a and b, "or": a or b, "implies": (not a) or b}[kind]
        if any(isinstance(x, Generic) for x in args):
            return self._generic_eps(kind, param, args, ty)
        return _EPS_BUILTINS[kind](param, *args)

    def _generic_eps(self, kind, param, args, ty):
        key = (kind, param) + tuple(args)
        if ty == O:
            return self.oracle.choose(key, [True, False])
        if kind == "quo":
            return self.oracle.choose(key, [self.fresh(EPS)])
        return self.oracle.choose(key, [UNDEFINED, self.fresh(EPS)])

    # ------------------------------------------------------------ equality

    def equal(self, a, b, ty) -> bool:
        """Identity of two values of type ``ty``; two absent values count as equal."""
        if a is b:
            return True
        if a is UNDEFINED or b is UNDEFINED:
            return False
        if isinstance(a, Generic) or isinstance(b, Generic):
            if a == b:
                return True
            return self.oracle.choose(("eq", frozenset((a, b))), [True, False])
        if not isinstance(ty, Arrow):
            return a == b
        if self._same_function(a, b):
            return True
        dom = self.m.domain(ty.dom)
        if dom is not None:
            for d in dom:
                if not self.equal(self.apply(a, d), self.apply(b, d), ty.cod):
                    return False
            return True
        d = self.fresh(ty.dom)
        return self.equal(self.apply(a, d), self.apply(b, d), ty.cod)

    def _same_function(self, a, b) -> bool:
        if isinstance(a, Table) and isinstance(b, Table):
            return a == b
        if isinstance(a, Builtin) and isinstance(b, Builtin):
            if (a.kind, a.param, a.ty, len(a.args)) != (b.kind, b.param, b.ty, len(b.args)):
                return False
            # a sufficient condition: the same constant applied to the same arguments
            return all(x == y or self._same_function(x, y) for x, y in zip(a.args, b.args))
        if isinstance(a, Closure) and isinstance(b, Closure) and a.expr == b.expr:
            if a.env is b.env:
                return True
            if is_eval_free(a.expr):
                fv = a._free
                if fv is None:
                    fv = a._free = free_vars(a.expr)
                d = self.m.default
                return all(a.env.lookup(v, d) == b.env.lookup(v, d) for v in fv)
        return False

    # ------------------------------------------------------------ description

    def iota(self, p, ty):
        dom = self.m.domain(ty)
        if isinstance(p, Generic):
            opts = [UNDEFINED] + (list(dom) if dom is not None and len(dom) <= CHOICE_LIMIT else [self.fresh(ty)])
            return self.oracle.choose(("iota", p), opts)
        if dom is not None:
            found = UNDEFINED
            for d in dom:
                if self.apply(p, d) is True:
                    if found is not UNDEFINED:
                        return UNDEFINED
                    found = d
            return found
        d = self.fresh(ty)
        self.oracle.frozen += 1
        try:
            self.apply(p, d)
        except NeedChoice:
            pass
        else:
            # the predicate ignores its argument: it holds of none or of all
            # of a domain with more than one element
            return UNDEFINED
        finally:
            self.oracle.frozen -= 1
        return self.oracle.choose(("iota", p), [UNDEFINED, self.fresh(ty)])


# ---------------------------------------------------------------- eps builtins


def _c_app(_, a, b):
    f, x = a.decoded, b.decoded
    if isinstance(f.ty, Arrow) and f.ty.dom == x.ty:
        return Construction(App(f, x))
    return UNDEFINED


def _c_abs(_, a, b):
    if isinstance(a.decoded, Var):
        return Construction(Abs(a.decoded, b.decoded))
    return UNDEFINED


def _c_cond(_, a, b, c):
    t, x, y = a.decoded, b.decoded, c.decoded
    if t.ty == O and x.ty == y.ty:
        return Construction(Cond(t, x, y))
    return UNDEFINED


def _is_var(param, a):
    d = a.decoded
    return isinstance(d, Var) and (param is None or d.ty == param)


def _is_con(param, a):
    d = a.decoded
    return isinstance(d, Const) and (param is None or d.ty == param)


_EPS_BUILTINS = {
    "app": _c_app,
    "abs": _c_abs,
    "cond": _c_cond,
    "quo": lambda _, a: Construction(Quote(a.decoded)),
    "is-var": _is_var,
    "is-con": _is_con,
    "is-expr": lambda param, a: a.decoded.ty == param,
    "sub": lambda _, a, b: proper_subexpr(a, b),
    "is-free-in": lambda _, a, b: is_free_in(a, b),
}


# ---------------------------------------------------------------- verdicts

VALID, REFUTED, UNDECIDED = "valid", "refuted", "undecided"


@dataclass
class Verdict:
    status: str
    witness: Optional[Dict] = None
    runs: int = 0
    bounded: bool = False
    note: str = ""

    @property
    def valid(self) -> bool:
        return self.status == VALID


def _search(model: FiniteModel, fn, max_runs: int = MAX_RUNS):
    """Run ``fn(evaluator)`` over every combination of oracle choices.

    Returns ``(status, runs)``: valid if every run returns True, refuted if
    a run without choices returns False, undecided otherwise.
    """
    stack = [[]]
    runs = 0
    while stack:
        prefix = stack.pop()
        runs += 1
        if runs > max_runs:
            return UNDECIDED, runs, "choice budget exhausted"
        oracle = Oracle(prefix)
        result = fn(Evaluator(model, oracle))
        if result is not True:
            if not oracle.counts:
                return REFUTED, runs, ""
            return UNDECIDED, runs, "false only under some choices for generic elements"
        taken, counts = oracle.taken, oracle.counts
        for j in range(len(counts) - 1, len(prefix) - 1, -1):
            for k in range(counts[j] - 1, 0, -1):
                stack.append(taken[:j] + [k])
    return VALID, runs, ""


def _assignments(model: FiniteModel, variables: Sequence[Var]):
    doms = []
    for v in variables:
        dom = model.domain(v.ty)
        if dom is None:
            return None
        doms.append(dom)
    return (dict(zip(variables, vals)) for vals in itertools.product(*doms))


def _sorted_vars(vs):
    return sorted(vs, key=lambda v: (v.name, str(v.ty)))


def check_formula(
    model: FiniteModel,
    formula: Expr,
    assignment: Optional[Dict[Var, Any]] = None,
    max_runs: int = MAX_RUNS,
) -> Verdict:
    """Decide validity of ``formula`` in ``model``.

    Free variables not fixed by ``assignment`` range over their whole domain;
    for a refuted formula the first falsifying assignment is reported.
    """
    if formula.ty != O:
        from .errors import NotAFormula

        raise NotAFormula(f"expected a formula, got type {formula.ty}")
    if not language_contains(model.theory, formula):
        raise NotInLanguage("formula is outside the language of the model's theory")
    fixed = dict(assignment or {})
    open_vars = _sorted_vars(v for v in syntactic_free_vars(formula) if v not in fixed)
    enum_vars = [v for v in open_vars if model.domain(v.ty) is not None]
    symbolic_vars = [v for v in open_vars if model.domain(v.ty) is None]
    if symbolic_vars and not model.symbolic:
        raise EpsEnumeration(f"cannot enumerate values of {symbolic_vars[0].ty}")
    total_runs = 0
    undecided = None
    for phi in _assignments(model, enum_vars):
        base = {**fixed, **phi}

        def run(ev, base=base):
            env = Env.of(base)
            for v in symbolic_vars:
                env = env.bind(v, ev.fresh(v.ty))
            return ev.value(formula, env)

        status, runs, note = _search(model, run, max_runs)
        total_runs += runs
        if status == REFUTED:
            return Verdict(REFUTED, witness=phi, runs=total_runs, bounded=model.eps_depth is not None)
        if status == UNDECIDED and undecided is None:
            undecided = Verdict(UNDECIDED, witness=phi, runs=total_runs, note=note)
    if undecided is not None:
        undecided.runs = total_runs
        return undecided
    return Verdict(VALID, runs=total_runs, bounded=model.eps_depth is not None)


def is_valid(model: FiniteModel, formula: Expr, assignment=None) -> bool:
    """True iff ``formula`` is T under every assignment.

    Raises :class:`Undecided` when the symbolic checker cannot settle it.
    """
    v = check_formula(model, formula, assignment)
    if v.status == UNDECIDED:
        raise Undecided(f"could not decide the formula: {v.note}")
    return v.status == VALID


def valuate(model: FiniteModel, e: Expr, assignment: Optional[Dict[Var, Any]] = None):
    """The value of ``e`` (or ``UNDEFINED``) under ``assignment``.

    Raises :class:`Undecided` if the value depends on a generic element.
    """
    ev = Evaluator(model, Oracle(enabled=False))
    try:
        return ev.value(e, Env.of(assignment))
    except NeedChoice as exc:
        raise Undecided("the value depends on elements of a domain too large to enumerate") from exc


def values_equal(model: FiniteModel, a, b, ty) -> bool:
    """Semantic identity of two values (absent values are equal to each other)."""
    status, _, note = _search(model, lambda ev: ev.equal(a, b, ty))
    if status == UNDECIDED:
        raise Undecided(note)
    return status == VALID


# ---------------------------------------------------------------- reports


@dataclass
class CheckResult:
    label: str
    formula: Expr
    verdict: Verdict
    group: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.verdict.status == VALID


@dataclass
class Report:
    results: List[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.ok]

    @property
    def undecided(self) -> List[CheckResult]:
        return [r for r in self.results if r.verdict.status == UNDECIDED]


def _peel(formula: Expr) -> Tuple[List[Var], Expr]:
    """Strip leading universal quantifiers."""
    bound = []
    while True:
        s = recognize(formula)
        if s is None or s[0] is not SugarForm.FORALL:
            return bound, formula
        bound.append(s[1][0])
        formula = s[1][1]


def _clash_free(bound: List[Var]) -> bool:
    return len({v.name for v in bound}) == len(bound)


def check_axiom(model: FiniteModel, axiom: Expr) -> Verdict:
    verdict = check_formula(model, axiom)
    if verdict.status == REFUTED:
        bound, body = _peel(axiom)
        if bound and _clash_free(bound):
            inner = check_formula(model, body)
            if inner.status == REFUTED:
                verdict.witness = inner.witness
    return verdict


def check_theory(model: FiniteModel) -> Report:
    report = Report()
    for k, a in enumerate(model.theory.axioms, 1):
        report.results.append(CheckResult(f"axiom {k}", a, check_axiom(model, a)))
    return report


def check_obligations(model: FiniteModel, trans, types=None, pedantic: bool = False) -> Report:
    from .translation import obligations

    report = Report()
    for ob in obligations(trans, types, pedantic):
        verdict = check_axiom(model, ob.formula)
        report.results.append(CheckResult(ob.subject_text, ob.formula, verdict, group=ob.group))
    return report


def format_value(v) -> str:
    if v is UNDEFINED:
        return "undefined"
    if v is True:
        return "T"
    if v is False:
        return "F"
    if isinstance(v, Construction):
        from .printer import print_expr

        return f"[[{print_expr(v.decoded)}]]"
    return repr(v)


def format_assignment(phi: Optional[Dict]) -> str:
    if not phi:
        return ""
    return ", ".join(f"{v.name}:{v.ty} = {format_value(x)}" for v, x in sorted(phi.items(), key=lambda kv: kv[0].name))
