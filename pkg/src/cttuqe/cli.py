"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 bad input, 3 undecided.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from collections import Counter
from typing import List, Optional

from .errors import CttError, NotAFormula, NotInLanguage, NotSemanticallyClosed
from .files import load_model, load_pretranslation, load_theory, load_translation, write_elaboration
from .model import REFUTED, UNDECIDED, Report, check_obligations, check_theory, format_assignment
from .parser import parse_expr, parse_type
from .printer import print_expr
from .translation import GROUP_NAMES, check_translation, default_types, obligations

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNDECIDED = 0, 1, 2, 3

CORPUS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "corpus")


class Output:
    """Collects results and renders them as text or as the JSON envelope."""

    def __init__(self, command: str, inputs: dict, as_json: bool):
        self.command = command
        self.inputs = inputs
        self.as_json = as_json
        self.results: List[dict] = []
        self.diagnostics: List[dict] = []

    def line(self, text: str = ""):
        if not self.as_json:
            print(text)

    def result(self, **fields):
        self.results.append(fields)

    def diagnostic(self, code: str, message: str):
        self.diagnostics.append({"code": code, "message": message})
        if not self.as_json:
            print(f"{code}: {message}", file=sys.stderr)

    def finish(self, status: int) -> int:
        if self.as_json:
            envelope = {
                "command": self.command,
                "inputs": self.inputs,
                "results": self.results,
                "diagnostics": self.diagnostics,
                "exit": status,
            }
            print(json.dumps(envelope, indent=2, sort_keys=True))
        return status


def parse_types(spec: Optional[str], trans):
    """``occurring`` (default), ``+A,B`` (occurring plus extras) or ``A,B``."""
    if spec is None or spec == "occurring":
        return None
    extra = spec.startswith("+")
    names = [s.strip() for s in spec.lstrip("+").split(",") if s.strip()]
    given = [parse_type(s, trans.source) for s in names]
    return default_types(trans, given) if extra else given


def report_status(report: Report) -> int:
    if report.ok:
        return EXIT_OK
    if any(r.verdict.status == REFUTED for r in report.results):
        return EXIT_FAIL
    return EXIT_UNDECIDED


def emit_report(out: Output, report: Report, theory=None):
    for r in report.results:
        v = r.verdict
        entry = {"label": r.label, "status": v.status, "formula": print_expr(r.formula, theory)}
        if r.group is not None:
            entry["group"] = r.group
        if v.witness:
            entry["witness"] = format_assignment(v.witness)
        if v.note:
            entry["note"] = v.note
        out.result(**entry)
        prefix = f"[{r.group}] " if r.group is not None else ""
        line = f"{v.status:9} {prefix}{r.label}"
        if v.witness:
            line += f"  (counterexample: {format_assignment(v.witness)})"
        elif v.note and v.status == UNDECIDED:
            line += f"  ({v.note})"
        out.line(line)
    n = len(report.results)
    bad = len(report.failures)
    out.line(f"{n - bad}/{n} valid")


# ---------------------------------------------------------------- commands


def cmd_check(args, out: Output) -> int:
    try:
        t = load_theory(args.theory)
    except (NotAFormula, NotInLanguage, NotSemanticallyClosed) as exc:
        out.diagnostic("not-normal", str(exc))
        return EXIT_FAIL
    out.line(f"theory {t.name}: {len(t.user_bases)} base types, {len(t.consts)} constants, "
             f"{len(t.axioms)} axioms, {len(t.definitions)} definitions")
    for k, a in enumerate(t.axioms, 1):
        out.result(axiom=k, formula=print_expr(a, t), normal=True)
    out.line("normal: all axioms are closed formulas without evaluation")
    return EXIT_OK


def _translation(args, out: Output):
    t = load_translation(args.trans)
    diags = check_translation(t)
    for d in diags:
        out.diagnostic(d.code, d.message)
    return t, diags


def cmd_translate(args, out: Output) -> int:
    t, diags = _translation(args, out)
    if diags:
        return EXIT_FAIL
    e = parse_expr(args.expr, t.source)
    image = t.nu_bar(e)
    text = print_expr(image, t.target)
    out.result(expr=print_expr(e, t.source), image=text, type=str(image.ty))
    out.line(text)
    return EXIT_OK


def cmd_obligations(args, out: Output) -> int:
    t, diags = _translation(args, out)
    if diags:
        return EXIT_FAIL
    types = parse_types(args.types, t)
    obs = obligations(t, types, args.pedantic)
    counts = Counter(ob.group for ob in obs)
    group = None
    for ob in obs:
        if ob.group != group:
            group = ob.group
            out.line(f"group {group} ({GROUP_NAMES[group]}): {counts[group]}")
        text = print_expr(ob.formula, t.target)
        out.result(group=ob.group, subject=ob.subject_text, formula=text)
        out.line(f"  {ob.subject_text}: {text}")
    out.line(f"total {len(obs)}")
    return EXIT_OK


def cmd_model_check(args, out: Output) -> int:
    t = load_theory(args.theory)
    m = load_model(args.model, t, args.eps_depth)
    report = check_theory(m)
    emit_report(out, report, t)
    return report_status(report)


def cmd_verify(args, out: Output) -> int:
    t, diags = _translation(args, out)
    if diags:
        return EXIT_FAIL
    m = load_model(args.model, t.target, args.eps_depth)
    report = check_obligations(m, t, parse_types(args.types, t), args.pedantic)
    emit_report(out, report, t.target)
    return report_status(report)


def cmd_elaborate(args, out: Output) -> int:
    pre = load_pretranslation(args.pre)
    theory_path, trans_path = write_elaboration(pre, args.output)
    diags = check_translation(load_translation(trans_path))
    for d in diags:
        out.diagnostic(d.code, d.message)
    out.result(theory=theory_path, translation=trans_path)
    out.line(f"wrote {theory_path}")
    out.line(f"wrote {trans_path}")
    return EXIT_FAIL if diags else EXIT_OK


# ---------------------------------------------------------------- examples


def _corpus(*parts):
    return os.path.join(CORPUS, *parts)


def _verify(trans_path, model_path):
    t = load_translation(trans_path)
    if check_translation(t):
        return False
    return check_obligations(load_model(model_path, t.target), t).ok


def example_checks():
    """The example corpus as (name, expected, thunk) rows; a thunk returns
    True when its check succeeds."""

    def ex1_counts():
        t = load_translation(_corpus("phi.cttr"))
        n = len(default_types(t))
        want = {1: 1, 2: 3, 3: n, 4: n - 1, 5: 8, 6: 3 * n, 7: 3}
        return dict(Counter(ob.group for ob in obligations(t))) == want

    def ex1_draft():
        with tempfile.TemporaryDirectory() as d:
            _, trans_path = write_elaboration(load_pretranslation(_corpus("ex1.cttp")), d)
            return not check_translation(load_translation(trans_path))

    def ex2_elaborate():
        with tempfile.TemporaryDirectory() as d:
            theory_path, trans_path = write_elaboration(load_pretranslation(_corpus("ex2.cttp")), d)
            with open(theory_path) as a, open(_corpus("psi", "M_bar.cttu")) as b:
                same = a.read() == b.read()
            return same and not check_translation(load_translation(trans_path))

    def clash():
        diags = check_translation(load_translation(_corpus("phi_clash.cttr")))
        return any(d.code == "injectivity" for d in diags)

    def dropped_axiom():
        t = load_translation(_corpus("phi_undefined.cttr"))
        report = check_obligations(load_model(_corpus("z2_undefined.cttm"), t.target), t)
        return any(r.group == 7 and r.verdict.status == REFUTED for r in report.results)

    def wrong_identity():
        report = check_theory(load_model(_corpus("z2_e1.cttm")))
        return any(r.verdict.status == REFUTED and r.verdict.witness for r in report.results)

    return [
        ("example 1: obligation counts", True, ex1_counts),
        ("example 1: Phi in Z_1", True, lambda: _verify(_corpus("phi.cttr"), _corpus("z1.cttm"))),
        ("example 1: Phi in Z_2", True, lambda: _verify(_corpus("phi.cttr"), _corpus("z2.cttm"))),
        ("example 1: draft elaborates", True, ex1_draft),
        ("example 2: draft elaborates", True, ex2_elaborate),
        ("example 2: Psi in Z_2", True, lambda: _verify(_corpus("psi", "Psi.cttr"), _corpus("psi", "z2.cttm"))),
        ("control: clashing identities rejected", True, clash),
        ("control: missing e' = e refuted", True, dropped_axiom),
        ("control: e = 1 refutes the axioms", True, wrong_identity),
    ]


def cmd_run_examples(args, out: Output) -> int:
    status = EXIT_OK
    for name, expected, thunk in example_checks():
        start = time.perf_counter()
        try:
            got = bool(thunk())
        except CttError as exc:
            out.diagnostic("error", f"{name}: {exc}")
            got = False
        passed = got == expected
        secs = time.perf_counter() - start
        out.result(name=name, passed=passed)
        out.line(f"{'PASS' if passed else 'FAIL'}  {name}  ({secs:.2f}s)")
        if not passed:
            status = EXIT_FAIL
    return status


# ---------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cttuqe", description="Theories, translations and finite models for CTT_uqe.")
    sub = p.add_subparsers(dest="command", required=True)

    def command(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--json", action="store_true", help="print a JSON envelope")
        sp.set_defaults(fn=fn)
        return sp

    sp = command("check", cmd_check, "parse a theory and check that it is normal")
    sp.add_argument("theory")

    sp = command("translate", cmd_translate, "translate a source expression")
    sp.add_argument("--trans", required=True)
    sp.add_argument("--expr", required=True)

    sp = command("obligations", cmd_obligations, "list the obligations of a translation")
    sp.add_argument("--trans", required=True)
    sp.add_argument("--types", default="occurring", help="occurring, +T1,T2 (extra types) or T1,T2")
    sp.add_argument("--pedantic", action="store_true", help="include the trivial o and eps cases of group 1")

    sp = command("model-check", cmd_model_check, "check the axioms of a theory in a finite model")
    sp.add_argument("--theory", required=True)
    sp.add_argument("--model", required=True)
    sp.add_argument("--eps-depth", type=int, default=None)

    sp = command("verify-morphism", cmd_verify, "check all obligations in a finite model of the target")
    sp.add_argument("--trans", required=True)
    sp.add_argument("--model", required=True)
    sp.add_argument("--types", default="occurring")
    sp.add_argument("--pedantic", action="store_true")
    sp.add_argument("--eps-depth", type=int, default=None,
                    help="enumerate constructions up to this depth instead of treating them symbolically")

    sp = command("elaborate-pretranslation", cmd_elaborate, "turn a draft translation into a bona fide one")
    sp.add_argument("--pre", required=True)
    sp.add_argument("-o", "--output", required=True)

    command("run-examples", cmd_run_examples, "run the bundled example corpus")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in ("fn", "json", "command")}
    out = Output(args.command, inputs, args.json)
    try:
        status = args.fn(args, out)
    except (CttError, OSError) as exc:
        out.diagnostic(type(exc).__name__, str(exc))
        status = EXIT_INPUT
    return out.finish(status)


if __name__ == "__main__":
    sys.exit(main())
