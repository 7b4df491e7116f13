import itertools
import os
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cttuqe.errors import EpsEnumeration, ModelError, NotInLanguage, Undecided
from cttuqe.files import load_model, load_theory, parse_model
from cttuqe.model import (
    REFUTED,
    UNDECIDED,
    UNDEFINED,
    VALID,
    FiniteModel,
    Indiv,
    check_formula,
    check_theory,
    is_valid,
    valuate,
    values_equal,
)
from cttuqe.parser import parse_expr
from cttuqe.quotation import Construction
from cttuqe.sugar import AND_FN, FALSE, TRUE, and_, bottom, forall, is_defined, quasi_eq
from cttuqe.syntax import EPS, O, Abs, App, Base, Cond, Const, Quote, Var, arrow
from cttuqe.theory import Theory

from gen import ExprGen

CORPUS = os.path.join(os.path.dirname(__file__), "..", "src", "cttuqe", "corpus")
i = Base("i")

T4 = Theory(
    "T4",
    bases=("i",),
    consts=(
        Const("c", i),
        Const("g", arrow(i, i)),
        Const("p", arrow(i, O)),
        Const("r", arrow(i, i, O)),
    ),
)


def corpus(name):
    return os.path.join(CORPUS, name)


def random_model(rng, n, theory=T4):
    """A model of the signature of T4 with a partial g."""
    lines = [f"carrier i = {n}", f"const c = {rng.randrange(n)}"]
    g = [f"({k}) -> {rng.randrange(n)}" for k in range(n) if rng.random() < 0.8]
    lines.append("const g = {" + ", ".join(g) + "}")
    p = [f"({k}) -> {rng.choice('TF')}" for k in range(n)]
    lines.append("const p = {" + ", ".join(p) + "}")
    r = [f"({a},{b}) -> {rng.choice('TF')}" for a in range(n) for b in range(n)]
    lines.append("const r = {" + ", ".join(r) + "}")
    return parse_model("\n".join(lines), theory=theory)


@pytest.fixture(scope="module")
def z2():
    return load_model(corpus("z2_m.cttm"))


def test_axioms_hold_in_z2(z2):
    assert check_theory(z2).ok
    b = z2.theory.axioms[1]
    assert valuate(z2, b) is True
    assert is_valid(z2, parse_expr("x:i = x:i", z2.theory))
    assert not is_valid(z2, FALSE)


def test_wrong_identity_refuted():
    m = load_model(corpus("z2_e1.cttm"))
    report = check_theory(m)
    assert [r.label for r in report.failures] == ["axiom 2", "axiom 3"]
    witness = report.failures[0].verdict.witness
    assert [(v.name, x.index) for v, x in witness.items()] == [("x", 0)]


def test_one_point_models_every_monoid():
    m = load_model(corpus("z1_m.cttm"))
    assert check_theory(m).ok


def test_bottom_and_definedness(z2):
    assert valuate(z2, bottom(i)) is UNDEFINED
    assert valuate(z2, bottom(arrow(i, i))) is UNDEFINED
    assert valuate(z2, bottom(O)) is False
    assert valuate(z2, is_defined(bottom(i))) is False
    assert valuate(z2, TRUE) is True and valuate(z2, FALSE) is False


def test_cond_is_not_strict(z2):
    e = z2.theory.lookup("e")
    assert valuate(z2, Cond(TRUE, e, bottom(i))) == Indiv("i", 0)
    assert valuate(z2, Cond(FALSE, bottom(i), e)) == Indiv("i", 0)


def test_application_is_strict(z2):
    star = z2.theory.lookup("*")
    e = z2.theory.lookup("e")
    assert valuate(z2, App(App(star, bottom(i)), e)) is UNDEFINED
    # at type o an undefined application is F
    assert valuate(z2, parse_expr(r"(\x:i. x = x) bot:i", z2.theory)) is False


def test_quote_and_eval(z2):
    e = z2.theory.lookup("e")
    assert valuate(z2, Quote(e)) == Construction(e)
    assert valuate(z2, parse_expr("eval([[e]], i)", z2.theory)) == Indiv("i", 0)
    # wrong type: undefined, or F at o
    assert valuate(z2, parse_expr("eval([[e]], i -> i)", z2.theory)) is UNDEFINED
    assert valuate(z2, parse_expr("eval([[e]], o)", z2.theory)) is False
    # the evaluated code sees the current assignment
    x = Var("x", i)
    assert valuate(z2, parse_expr("eval([[x:i]], i)", z2.theory), {x: Indiv("i", 1)}) == Indiv("i", 1)


def test_eps_builtins(z2):
    th = z2.theory
    assert valuate(z2, parse_expr("is-var [[x:i]]", th)) is True
    assert valuate(z2, parse_expr("is-con@i [[e]]", th)) is True
    assert valuate(z2, parse_expr("is-expr@o [[e]]", th)) is False
    assert valuate(z2, parse_expr("app [[(*)]] [[e]]", th)) == Construction(parse_expr("(*) e", th))
    # app of an ill-typed pair is undefined
    assert valuate(z2, parse_expr("app [[e]] [[e]]", th)) is UNDEFINED
    assert valuate(z2, parse_expr("[[x:i]] sub [[e * x:i]]", th)) is True
    assert valuate(z2, parse_expr("is-free-in [[x:i]] [[\\x:i. x]]", th)) is False


def test_eps_quantifiers(z2):
    th = z2.theory
    law = parse_expr(r"!u:eps. is-var u \/ ~is-var u", th)
    assert check_formula(z2, law).status == VALID
    wrong = parse_expr("!u:eps. is-var u", th)
    assert check_formula(z2, wrong).status == UNDECIDED
    # generic constructions do not correlate different predicates
    exclusive = parse_expr("!u:eps. is-var u => ~is-con u", th)
    assert check_formula(z2, exclusive).status == UNDECIDED
    strict = FiniteModel(th, z2.carriers, z2.interp, symbolic=False)
    with pytest.raises(EpsEnumeration):
        check_formula(strict, law)
    bounded = FiniteModel(th, z2.carriers, z2.interp, eps_depth=2)
    v = check_formula(bounded, wrong)
    assert v.status == REFUTED and v.bounded
    assert check_formula(bounded, exclusive).status == VALID


def test_valuate_needs_choices(z2):
    # free variables take the default value; quantifying over eps cannot
    assert valuate(z2, parse_expr("is-var u:eps", z2.theory)) is True
    with pytest.raises(Undecided):
        valuate(z2, parse_expr("!u:eps. is-var u", z2.theory))


def test_language_checked(z2):
    with pytest.raises(NotInLanguage):
        check_formula(z2, parse_expr("e' = e'", load_theory(corpus("mbar.cttu"))))


def test_model_errors():
    m = load_theory(corpus("m.cttu"))
    with pytest.raises(ModelError):
        FiniteModel(m, {"i": 0}, {})
    with pytest.raises(ModelError):
        FiniteModel(m, {"i": 2}, {m.lookup("e"): Indiv("i", 0)})
    with pytest.raises(ModelError):
        parse_model("carrier i = 2\nconst e = 5\nconst * = {(0,0) -> 0}", theory=m)


def test_function_equality_is_extensional_with_gaps():
    rng = random.Random(0)
    m = random_model(rng, 3)
    a = parse_expr(r"\x:i. g x", T4)
    b = valuate(m, Const("g", arrow(i, i)))
    assert values_equal(m, valuate(m, a), b, arrow(i, i))
    c = parse_expr(r"\x:i. if (x = c) bot:i (g x)", T4)
    assert not values_equal(m, valuate(m, c), b, arrow(i, i))


def _slow_and(a, b):
    # the same lambda term under other names: no native shortcut applies
    x, y = Var("a", O), Var("b", O)
    g = Var("h", arrow(O, O, O))
    slow = Abs(x, Abs(y, App(App(Const("=", arrow(arrow(arrow(O, O, O), O), arrow(arrow(O, O, O), O), O)),
        Abs(g, App(App(g, TRUE), TRUE))), Abs(g, App(App(g, x), y)))))
    assert slow != AND_FN
    return App(App(slow, a), b)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_native_connectives_match_definition(seed):
    rng = random.Random(seed)
    m = random_model(rng, rng.randint(1, 3))
    gen = ExprGen(rng, T4, max_depth=3, closed=True, eps=False)
    a, b = gen.expr(O), gen.expr(O)
    assert valuate(m, and_(a, b)) == valuate(m, _slow_and(a, b))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_formulas_are_always_defined(seed):
    rng = random.Random(seed)
    m = random_model(rng, rng.randint(1, 3))
    gen = ExprGen(rng, T4, max_depth=5, closed=True, eps=False)
    assert valuate(m, gen.expr(O)) in (True, False)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_forall_matches_conjunction(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    m = random_model(rng, n)
    x = Var("x", i)
    body = ExprGen(rng, T4, max_depth=4, closed=True, eps=False)._gen(O, 4, (x,), False)
    want = all(valuate(m, body, {x: Indiv("i", k)}) is True for k in range(n))
    assert valuate(m, forall(x, body)) is want


def test_quasi_eq_on_pairs():
    rng = random.Random(11)
    m = random_model(rng, 3)
    gen = ExprGen(rng, T4, max_depth=4, closed=True, eps=False)
    for _ in range(200):
        ty = rng.choice([i, arrow(i, i)])
        a, b = gen.expr(ty), gen.expr(ty)
        va, vb = valuate(m, a), valuate(m, b)
        if va is UNDEFINED or vb is UNDEFINED:
            want = va is vb
        else:
            want = values_equal(m, va, vb, ty)
        assert valuate(m, quasi_eq(a, b)) is want


def test_iota_by_enumeration():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(1, 4)
        m = random_model(rng, n)
        x = Var("x", i)
        body = ExprGen(rng, T4, max_depth=4, closed=True, eps=False)._gen(O, 4, (x,), False)
        sat = [k for k in range(n) if valuate(m, body, {x: Indiv("i", k)}) is True]
        got = valuate(m, App(Const("iota", arrow(arrow(i, O), i)), Abs(x, body)))
        assert got == (Indiv("i", sat[0]) if len(sat) == 1 else UNDEFINED)
