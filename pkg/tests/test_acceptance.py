"""End-to-end acceptance checks; run with ``-s`` to see one line per criterion."""

import contextlib
import io
import os
import random
import time

from cttuqe.cli import EXIT_OK, main
from cttuqe.files import load_model, load_translation
from cttuqe.model import REFUTED, UNDEFINED, Indiv, check_obligations, check_theory, valuate, values_equal
from cttuqe.quotation import Construction, decode, encode
from cttuqe.sugar import bottom, eval_at, is_defined, quasi_eq
from cttuqe.syntax import (
    O,
    Abs,
    App,
    Base,
    Cond,
    Quote,
    Var,
    arrow,
    iota_const,
    is_closed,
    is_eval_free,
    subexpressions,
)
from cttuqe.translation import check_translation, default_types, mu_bar, nu_bar, obligations, tau

from gen import SIG, ExprGen
from test_model import T4, random_model

CORPUS = os.path.join(os.path.dirname(__file__), "..", "src", "cttuqe", "corpus")
i = Base("i")

MODELS = [
    "z1.cttm",
    "z1_m.cttm",
    "z2.cttm",
    "z2_m.cttm",
    "z2_e1.cttm",
    "z2_undefined.cttm",
    os.path.join("psi", "z2.cttm"),
]


def corpus(*parts):
    return os.path.join(CORPUS, *parts)


@contextlib.contextmanager
def criterion(number, title, budget):
    """Times the block and prints one PASS/FAIL line for it."""
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        secs = time.perf_counter() - start
        ok = ok and secs < budget
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({secs:.2f}s, budget {budget}s)")
    assert secs < budget, f"criterion {number} took {secs:.2f}s"


def cli(*argv):
    with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
        return main([str(a) for a in argv])


def test_criterion_1_encoding_roundtrip():
    with criterion(1, "encode roundtrip and injectivity on 10000 expressions", 10):
        gen = ExprGen(random.Random(1), SIG, max_depth=6)
        seen = {}
        for _ in range(10_000):
            e = gen.expr()
            c = encode(e)
            assert decode(c) == e
            assert seen.setdefault(c, e) == e


def test_criterion_2_nu_bar():
    psi = load_translation(corpus("psi", "Psi.cttr"))
    with criterion(2, "nu-bar defined, injective and well typed on 1000 expressions", 10):
        gen = ExprGen(random.Random(2), psi.source, max_depth=5, evals=True)
        seen = {}
        for _ in range(1000):
            e = gen.expr()
            img = nu_bar(psi, e)
            assert img.ty == tau(mu_bar(psi, e.ty))
            assert seen.setdefault(img, e) == e


def test_criterion_3_example_one():
    with criterion(3, "example 1 obligation counts and validity in Z_1, Z_2", 30):
        phi = load_translation(corpus("phi.cttr"))
        assert check_translation(phi) == []
        n = len(default_types(phi))
        counts = {}
        for ob in obligations(phi):
            counts[ob.group] = counts.get(ob.group, 0) + 1
        assert counts == {1: 1, 2: 3, 3: n, 4: n - 1, 5: 8, 6: 3 * n, 7: 3}
        for model in ("z1.cttm", "z2.cttm"):
            assert cli("verify-morphism", "--trans", corpus("phi.cttr"), "--model", corpus(model)) == EXIT_OK


def test_criterion_4_example_two():
    with criterion(4, "example 2 obligations valid in Z_2, group 7 included", 60):
        assert cli("verify-morphism", "--trans", corpus("psi", "Psi.cttr"), "--model", corpus("psi", "z2.cttm")) == EXIT_OK
        psi = load_translation(corpus("psi", "Psi.cttr"))
        report = check_obligations(load_model(corpus("psi", "z2.cttm"), psi.target), psi)
        assert report.ok
        assert sum(r.group == 7 for r in report.results) == len(psi.source.axioms)


def test_criterion_5_negative_controls():
    with criterion(5, "negative controls a, b, c all fail", 10):
        diags = check_translation(load_translation(corpus("phi_clash.cttr")))
        assert any(d.code == "injectivity" for d in diags)

        t = load_translation(corpus("phi_undefined.cttr"))
        report = check_obligations(load_model(corpus("z2_undefined.cttm"), t.target), t)
        assert any(r.group == 7 and r.verdict.status == REFUTED for r in report.results)
        assert cli("verify-morphism", "--trans", corpus("phi_undefined.cttr"),
                   "--model", corpus("z2_undefined.cttm")) != EXIT_OK

        report = check_theory(load_model(corpus("z2_e1.cttm")))
        bad = {r.label: r.verdict for r in report.failures}
        assert "axiom 2" in bad and bad["axiom 2"].status == REFUTED and bad["axiom 2"].witness


def _agrees(m, a, b, ty):
    va, vb = valuate(m, a), valuate(m, b)
    if va is UNDEFINED or vb is UNDEFINED:
        return va is vb
    return values_equal(m, va, vb, ty)


def test_criterion_6_undefinedness():
    with criterion(6, "undefinedness semantics on every corpus model", 10):
        rng = random.Random(6)
        pairs = 0
        for name in MODELS:
            m = load_model(corpus(name))
            th = m.theory
            for ty in (i, arrow(i, i), arrow(i, i, i), arrow(i, O)):
                assert valuate(m, bottom(ty)) is UNDEFINED
            assert valuate(m, bottom(O)) is False
            assert valuate(m, is_defined(bottom(i))) is False
            e = th.lookup("e")
            ve = valuate(m, e)
            assert valuate(m, Cond(bottom(O), bottom(i), e)) == ve
            assert valuate(m, Cond(is_defined(e), e, bottom(i))) == ve
            gen = ExprGen(rng, th, max_depth=4, closed=True, eps=False, iota=True)
            for _ in range(200):
                ty = rng.choice([i, arrow(i, i), O])
                a, b = gen.expr(ty), gen.expr(ty)
                assert valuate(m, quasi_eq(a, b)) is _agrees(m, a, b, ty)
                assert valuate(m, gen.expr(O)) in (True, False)
                pairs += 1
        assert pairs >= 1000


def _corpus_expressions():
    """(model, closed eval-free subexpressions) for every corpus model."""
    out = []
    for name in MODELS:
        m = load_model(corpus(name))
        sources = list(m.theory.axioms)
        sources += [d for _, d in m.theory.definitions]
        found = []
        for s in sources:
            for sub in subexpressions(s):
                if is_closed(sub) and is_eval_free(sub) and sub not in found:
                    found.append(sub)
        out.append((m, found))
    return out


def test_criterion_7_quotation_laws():
    work = _corpus_expressions()
    with criterion(7, "disquotation and quotation laws on corpus expressions", 10):
        checked = 0
        for m, found in work:
            for a in found:
                assert valuate(m, Quote(a)) == encode(a) == Construction(a)
                want = valuate(m, a)
                got = valuate(m, eval_at(Quote(a), a.ty))
                if want is UNDEFINED:
                    assert got is UNDEFINED
                else:
                    assert values_equal(m, got, want, a.ty)
                checked += 1
        assert checked >= 300


def test_criterion_8_definite_description():
    with criterion(8, "definite description matches enumeration on 500 predicates", 10):
        rng = random.Random(8)
        x = Var("x", i)
        for _ in range(500):
            n = rng.randint(1, 4)
            m = random_model(rng, n)
            body = ExprGen(rng, T4, max_depth=4, closed=True, eps=False)._gen(O, 4, (x,), False)
            sat = [k for k in range(n) if valuate(m, body, {x: Indiv("i", k)}) is True]
            got = valuate(m, App(iota_const(i), Abs(x, body)))
            assert got == (Indiv("i", sat[0]) if len(sat) == 1 else UNDEFINED)
