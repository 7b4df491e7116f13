import functools
import os
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cttuqe.errors import MissingConstantMapping, NotAPredicate, NotInSourceLanguage, TypeMismatch
from cttuqe.files import load_model, load_pretranslation, load_theory, load_translation
from cttuqe.model import REFUTED, VALID, check_formula, check_obligations
from cttuqe.parser import parse_expr
from cttuqe.sugar import TRUE, bottom
from cttuqe.syntax import EPS, O, Abs, App, Arrow, Base, Cond, Const, Quote, Var, arrow, is_eval_free, syntactic_free_vars
from cttuqe.theory import definitional_extension, language_contains
from cttuqe.translation import (
    Translation,
    arrow_pred,
    check_translation,
    default_types,
    elaborate_pretranslation,
    mu_bar,
    nu_bar,
    obligations,
    tau,
    true_pred,
)

from gen import ExprGen

CORPUS = os.path.join(os.path.dirname(__file__), "..", "src", "cttuqe", "corpus")
i = Base("i")


def corpus(*parts):
    return os.path.join(CORPUS, *parts)


@pytest.fixture(scope="module")
def phi():
    return load_translation(corpus("phi.cttr"))


@functools.lru_cache(maxsize=None)
def load_psi():
    return load_translation(corpus("psi", "Psi.cttr"))


@pytest.fixture(scope="module")
def psi():
    return load_psi()


@pytest.fixture(scope="module")
def z2_psi(psi):
    return load_model(corpus("psi", "z2.cttm"), psi.target)


def test_tau():
    assert tau(true_pred(i)) == i
    with pytest.raises(NotAPredicate):
        tau(Var("x", i))


def test_arrow_pred_types():
    p, q = true_pred(i), true_pred(O)
    assert arrow_pred(p, q).ty == Arrow(Arrow(i, O), O)
    assert tau(arrow_pred(p, q)) == Arrow(tau(p), tau(q))
    assert not syntactic_free_vars(arrow_pred(p, q))
    with pytest.raises(ValueError):
        arrow_pred(p, q, guard="other")


def test_mu_bar(phi, psi):
    assert mu_bar(phi, i) == true_pred(i)
    assert mu_bar(psi, i) == parse_expr(r"\x:i. x = e", psi.target)
    assert mu_bar(psi, Arrow(i, i)) == arrow_pred(mu_bar(psi, i), mu_bar(psi, i))
    assert tau(mu_bar(psi, arrow(i, i, i))) == arrow(i, i, i)


def test_arrow_pred_slices(psi, z2_psi):
    # the unary slice of *' respects {e}, unrestricted * does not
    p = mu_bar(psi, Arrow(i, i))
    good = parse_expr("(*') e", psi.target)
    bad = parse_expr("(*) e", psi.target)
    assert check_formula(z2_psi, App(p, good)).status == VALID
    assert check_formula(z2_psi, App(p, bad)).status == REFUTED


def test_nu_bar_axiom(phi):
    b = phi.source.axioms[1]
    got = nu_bar(phi, b)
    x = Var("x", i)
    body = parse_expr("e * x = x", phi.target, env=[x])
    guard = lambda inner: Abs(x, Cond(App(true_pred(i), x), inner, bottom(O)))
    eq_o1 = Const("=", arrow(Arrow(i, O), Arrow(i, O), O))
    assert got == App(App(eq_o1, guard(TRUE)), guard(body))
    assert nu_bar(phi, x) == x


def test_nu_bar_rejects_foreign_symbols(phi):
    with pytest.raises(NotInSourceLanguage):
        nu_bar(phi, Const("e", i))
    with pytest.raises(NotInSourceLanguage):
        nu_bar(phi, Var("y", Base("j")))


def test_missing_eq_image(psi):
    bare = Translation(psi.source, psi.target, psi.mu, nu=psi.nu)
    with pytest.raises(MissingConstantMapping):
        nu_bar(bare, parse_expr("e = e", psi.source))
    assert any(d.code == "nu-total" for d in check_translation(bare))


def test_check_translation(phi):
    assert check_translation(phi) == []
    clash = load_translation(corpus("phi_clash.cttr"))
    diags = check_translation(clash)
    assert [d.code for d in diags] == ["injectivity"]
    assert "e_left" in diags[0].message and "e_right" in diags[0].message
    bad = Translation(phi.source, phi.target, {**phi.mu, "o": Abs(Var("x", O), Var("x", O))}, nu=phi.nu)
    assert "condition-1" in [d.code for d in check_translation(bad)]


def test_check_translation_type_errors(phi):
    nu = dict(phi.nu)
    nu[phi.source.lookup("e_left")] = Const("*", arrow(i, i, i))
    codes = {d.code for d in check_translation(Translation(phi.source, phi.target, phi.mu, nu=nu))}
    assert "condition-4" in codes
    missing = Translation(phi.source, phi.target, {})
    assert "mu-total" in {d.code for d in check_translation(missing)}


def test_obligation_counts(phi):
    n = len(default_types(phi))
    obs = obligations(phi)
    counts = Counter(ob.group for ob in obs)
    assert counts == {1: 1, 2: 3, 3: n, 4: n - 1, 5: 8, 6: 3 * n, 7: 3}
    assert obs[0].formula == parse_expr(r"?x:i. (\x:i. T) x", phi.target)
    pedantic = Counter(ob.group for ob in obligations(phi, pedantic=True))
    assert pedantic[1] == 3


def test_obligations_are_closed_and_in_language(phi, psi):
    for t in (phi, psi):
        for ob in obligations(t):
            assert ob.formula.ty == O
            assert is_eval_free(ob.formula)
            assert not syntactic_free_vars(ob.formula)
            assert language_contains(t.target, ob.formula)


def test_extra_types(phi):
    extra = [Arrow(Arrow(i, i), i)]
    base = len(obligations(phi))
    more = obligations(phi, default_types(phi, extra))
    assert len(more) > base


def test_group_five_identity(phi):
    g5 = [ob for ob in obligations(phi) if ob.group == 5]
    assert [ob.subject.name for ob in g5] == ["is-var", "is-con", "app", "abs", "cond", "quo", "sub", "is-free-in"]


def test_psi_star_obligation(psi, z2_psi):
    g2 = {ob.subject.name: ob for ob in obligations(psi) if ob.group == 2}
    star = g2["*"].formula
    assert star == App(mu_bar(psi, arrow(i, i, i)), psi.target.lookup("*'"))
    assert check_formula(z2_psi, star).status == VALID


# ------------------------------------------------------------ guard variants


def _with_star(psi, defn_text, guard):
    m = psi.source
    target = load_theory(corpus("m.cttu"))
    defn = parse_expr(defn_text, target)
    ext = definitional_extension(target, "*'", arrow(i, i, i), defn)
    t = Translation(m, ext, psi.mu, nu={m.lookup("*"): ext.lookup("*'")})
    p = t.mu_bar(i)
    q = arrow_pred(p, arrow_pred(p, p, guard), guard)
    return App(q, ext.lookup("*'")), load_model(corpus("z2_m.cttm"), ext)


CURRIED = r"\x:i. if (x = e) (\y:i. if (y = e) (x * y) bot:i) bot:(i -> i)"
UNCURRIED = r"\x:i. \y:i. if (x = e /\ y = e) (x * y) bot:i"


def test_curried_star_respects_predicate(psi):
    formula, model = _with_star(psi, CURRIED, "defined")
    assert check_formula(model, formula).status == VALID


def test_literal_guard_rejects_partial_functions(psi):
    # f x /= bot is T even where f x is undefined, so no partiality is allowed
    formula, model = _with_star(psi, CURRIED, "literal")
    assert check_formula(model, formula).status == REFUTED


def test_uncurried_star_fails_group_two(psi):
    # *' x for x /= e is the everywhere-undefined function, which is defined
    formula, model = _with_star(psi, UNCURRIED, "defined")
    assert check_formula(model, formula).status == REFUTED


# ------------------------------------------------------------ properties


def _source_gen(seed, theory, **kw):
    return ExprGen(random.Random(seed), theory, max_depth=5, evals=True, **kw)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_nu_bar_typing(seed):
    psi = load_psi()
    e = _source_gen(seed, psi.source).expr()
    img = nu_bar(psi, e)
    assert img.ty == tau(mu_bar(psi, e.ty))
    assert language_contains(psi.target, img)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
def test_nu_bar_injective(s1, s2):
    psi = load_psi()
    a = _source_gen(s1, psi.source).expr()
    b = _source_gen(s2, psi.source).expr()
    assert (nu_bar(psi, a) == nu_bar(psi, b)) == (a == b)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_nu_bar_commutes_with_quotation(seed):
    psi = load_psi()
    a = ExprGen(random.Random(seed), psi.source, max_depth=4).expr()
    img = nu_bar(psi, Quote(a))
    assert img == Quote(nu_bar(psi, a))


# ------------------------------------------------------------ pre-translations


def test_ex1_pretranslation(phi):
    pre = load_pretranslation(corpus("ex1.cttp"))
    ext, t = pre.elaborate()
    assert check_translation(t) == []
    new = [c for c in ext.consts if not pre.target.declares(c)]
    assert new == [Const("e'", i)]
    assert ext.axioms == phi.target.axioms
    assert t.nu_const(pre.source.lookup("e_right")) == Const("e'", i)


def test_ex2_pretranslation(psi):
    pre = load_pretranslation(corpus("ex2.cttp"))
    ext, t = pre.elaborate()
    assert check_translation(t) == []
    assert ext.lookup("*'").ty == arrow(i, i, i)
    assert ext.definition_of(ext.lookup("*'")) == parse_expr(CURRIED, pre.target)
    assert {c.name for c in ext.consts} == {"e", "*", "*'", "eq'", "iota'"}
    assert ext.axioms == psi.target.axioms


def test_injective_pretranslation_is_unchanged(phi):
    m = load_theory(corpus("m.cttu"))
    ext, t = elaborate_pretranslation(m, m, {"i": i}, {})
    assert ext is m
    assert check_translation(t) == []


def test_pretranslation_type_mismatch():
    m = load_theory(corpus("m.cttu"))
    with pytest.raises(TypeMismatch):
        elaborate_pretranslation(m, m, {"i": i}, {m.lookup("e"): m.lookup("*")})
