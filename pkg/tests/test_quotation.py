import glob
import itertools
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cttuqe.errors import NotAConstruction, NotEvalFree
from cttuqe.files import load_theory
from cttuqe.quotation import (
    Construction,
    decode,
    encode,
    encode_expr,
    is_con,
    is_con_at,
    is_construction,
    is_expr_at,
    is_free_in,
    is_var,
    is_var_at,
    proper_subexpr,
)
from cttuqe.syntax import (
    EPS,
    EPS_CONSTANT_TYPES,
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
    arrow,
    is_eval_free,
)

from gen import exprs

CORPUS = os.path.join(os.path.dirname(__file__), "..", "src", "cttuqe", "corpus")

i = Base("i")
x = Var("x", i)
e = Const("e", i)
f = Var("f", Arrow(i, i))
APP = Const("app", EPS_CONSTANT_TYPES["app"])
QUO = Const("quo", EPS_CONSTANT_TYPES["quo"])


def test_encode_clauses():
    assert encode_expr(x) == Quote(x)
    assert encode_expr(App(f, x)) == App(App(APP, Quote(f)), Quote(x))
    assert encode_expr(Quote(x)) == App(QUO, Quote(x))
    assert encode_expr(Abs(x, x)).ty == EPS


def test_encode_rejects_eval():
    with pytest.raises(NotEvalFree):
        encode(Eval(Var("u", EPS), x))


def test_decode():
    lam = Abs(x, x)
    assert decode(encode(lam)) == lam
    assert decode(encode_expr(lam)) == lam
    with pytest.raises(NotAConstruction):
        decode(Var("u", EPS))
    with pytest.raises(NotAConstruction):
        decode(Quote(App(f, x)))


def test_partial_application_is_not_a_construction():
    assert is_construction(encode_expr(x))
    assert not is_construction(Var("u", EPS))
    half = App(APP, Quote(f))
    assert half.ty != EPS
    assert not is_construction(App(QUO, App(App(APP, Var("u", EPS)), Quote(x))))


def test_ill_typed_construction_is_rejected():
    # app applied to codes whose decodings do not compose
    bad = App(App(APP, Quote(x)), Quote(x))
    assert not is_construction(bad)


def _all_terms(max_depth):
    """Every expression up to ``max_depth`` over a tiny vocabulary."""
    u = Var("u", EPS)
    p = Var("p", Arrow(i, O))
    leaves = [u, x, e, p] + [Const(n, t) for n, t in EPS_CONSTANT_TYPES.items() if n in ("app", "abs", "quo")]
    levels = [set(leaves)]
    for _ in range(max_depth - 1):
        prev = set().union(*levels)
        new = set()
        for a, b in itertools.product(prev, prev):
            if isinstance(a.ty, Arrow) and a.ty.dom == b.ty:
                new.add(App(a, b))
        for b in prev:
            new.add(Quote(b))
            for v in (x, u):
                new.add(Abs(v, b))
        levels.append(new - prev)
    return set().union(*levels)


def test_is_construction_matches_image_to_depth_3():
    terms = _all_terms(3)
    image = {encode_expr(t) for t in terms if is_eval_free(t)}
    eps_terms = [t for t in terms if t.ty == EPS]
    assert len(eps_terms) > 20
    for t in eps_terms:
        assert is_construction(t) == (t in image), t


@settings(max_examples=300, deadline=None)
@given(exprs())
def test_roundtrip(t):
    c = encode_expr(t)
    assert c.ty == EPS
    assert decode(c) == t
    assert is_construction(c)


@settings(max_examples=200, deadline=None)
@given(exprs(max_depth=4), exprs(max_depth=4))
def test_injective(a, b):
    assert (encode_expr(a) == encode_expr(b)) == (a == b)


def test_corpus_roundtrip():
    for path in sorted(glob.glob(os.path.join(CORPUS, "*.cttu"))):
        t = load_theory(path)
        for a in t.axioms:
            assert decode(encode(a)) == a


def test_predicates():
    assert is_var(encode(x))
    assert is_var_at(i, encode(x)) and not is_var_at(O, encode(x))
    assert not is_var(encode(e))
    assert is_con(encode(e)) and is_con_at(i, encode(e))
    assert is_expr_at(i, encode(e)) and not is_expr_at(O, encode(e))
    assert is_expr_at(Arrow(i, i), encode(Abs(x, x)))
    assert is_free_in(encode(x), encode(App(f, x)))
    assert not is_free_in(encode(x), encode(Quote(x)))
    assert not is_free_in(encode(x), encode(Abs(x, App(f, x))))
    assert not is_free_in(encode(e), encode(e))


def test_proper_subexpr_reads_decoded_syntax():
    t = App(f, x)
    assert proper_subexpr(encode(x), encode(t))
    assert not proper_subexpr(encode(t), encode(t))
    assert not proper_subexpr(encode(t), encode(x))
    # the binder and the contents of a quotation count as subexpressions
    assert proper_subexpr(encode(x), encode(Abs(x, e)))
    assert proper_subexpr(encode(x), encode(Quote(x)))


@settings(max_examples=100, deadline=None)
@given(exprs(max_depth=4), st.data())
def test_proper_subexpr_is_a_strict_order(t, data):
    from cttuqe.syntax import subexpressions

    subs = list(subexpressions(t))
    a = data.draw(st.sampled_from(subs))
    inner = list(subexpressions(a))
    b = data.draw(st.sampled_from(inner))
    assert not proper_subexpr(encode(a), encode(a))
    if proper_subexpr(encode(b), encode(a)) and proper_subexpr(encode(a), encode(t)):
        assert proper_subexpr(encode(b), encode(t))


def test_construction_equality():
    assert Construction(x) == encode(x)
    assert Construction(Abs(x, x)) != Construction(Abs(Var("y", i), Var("y", i)))
