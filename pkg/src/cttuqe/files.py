"""Readers and writers for theory (.cttu), translation (.cttr),
pre-translation (.cttp) and model (.cttm) files.

All formats are line based with ``#`` comments.  A section header is a
keyword followed by a colon at the start of a line; its entries follow on the
same line or on indented lines below.  Relative paths are resolved against
the directory of the file that mentions them.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import CttError, CttSyntaxError, ModelError, UnknownSymbol
from .model import UNDEFINED, FiniteModel, Indiv, Table
from .parser import parse_expr, parse_type, try_parse_type
from .printer import atomic_type, print_expr
from .quotation import Construction
from .sugar import eq
from .syntax import O, Arrow, Base, Const, Expr
from .theory import Theory, add_axiom, definitional_extension
from .translation import Translation, elaborate_pretranslation, true_pred

_HEADER = re.compile(r"([a-z_]+)\s*:(?!=)(.*)$")


@dataclass
class _Line:
    text: str
    lineno: int
    col: int = 1


def _strip(text: str) -> List[Tuple[int, int, str, bool]]:
    """Non-blank lines as (lineno, column, content, indented)."""
    out = []
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            col = len(line) - len(line.lstrip()) + 1
            out.append((k, col, line.strip(), raw[:1] in (" ", "\t")))
    return out


def _sections(text: str, keys, path="<string>"):
    """Split into (key, entries) pairs in file order; ``keys`` lists the
    section names, and the value-less header ``NAME rest`` is accepted for
    ``theory`` and ``translation``."""
    out: List[Tuple[str, List[_Line]]] = []
    for lineno, col, line, indented in _strip(text):
        m = _HEADER.match(line)
        if not indented and m and m.group(1) in keys:
            entries = []
            rest = m.group(2).strip()
            if rest:
                entries.append(_Line(rest, lineno, col + line.index(rest, m.start(2))))
            out.append((m.group(1), entries))
            continue
        word = line.split(None, 1)
        if not indented and word[0] in ("theory", "translation", "carrier", "const") and (
            len(word) > 1
        ):
            out.append((word[0], [_Line(word[1], lineno, col + line.index(word[1], len(word[0])))]))
            continue
        if not indented or not out:
            raise CttSyntaxError(f"{path}: cannot parse line {line!r}", lineno, 1)
        out[-1][1].append(_Line(line, lineno, col))
    return out


_LOCATION = re.compile(r"\s*(?:at line|\(line) (\d+), column (\d+)\)?$")


def _relocate(exc: CttError, path: str, line: _Line, offset: int = 0):
    """Rewrite an error raised while parsing ``line`` to point into the file.
    ``offset`` is where the parsed text starts within the entry."""
    msg = exc.args[0]
    where = f"{path}:{line.lineno}"
    m = _LOCATION.search(msg)
    if m:
        msg = msg[: m.start()]
        column = line.col + offset + int(m.group(2)) - 1
        where += f":{column}"
        if isinstance(exc, CttSyntaxError):
            exc.line, exc.column = line.lineno, column
    exc.args = (f"{where}: {msg}",)
    return exc


# ---------------------------------------------------------------- theories

_THEORY_KEYS = ("extends", "bases", "consts", "defs", "axioms")


def parse_theory(text: str, path: str = "<string>", base_dir: Optional[str] = None) -> Theory:
    base_dir = base_dir if base_dir is not None else os.path.dirname(os.path.abspath(path))
    name = os.path.splitext(os.path.basename(path))[0] if path != "<string>" else "theory"
    t = Theory(name)
    for key, entries in _sections(text, _THEORY_KEYS, path):
        for line in entries:
            try:
                t = _theory_entry(t, key, line.text, base_dir)
            except CttError as exc:
                raise _relocate(exc, path, line) from None
    return t


def _theory_entry(t: Theory, key: str, text: str, base_dir: str) -> Theory:
    if key == "theory":
        return t.renamed(text.strip())
    if key == "extends":
        parent = load_theory(os.path.join(base_dir, text.strip()))
        return Theory(
            t.name,
            parent.bases + t.user_bases,
            parent.consts + t.consts,
            parent.axioms + t.axioms,
            parent.definitions + t.definitions,
        )
    if key == "bases":
        names = [b for b in re.split(r"[\s,]+", text) if b]
        return t.with_bases(*[b for b in names if b not in t.bases])
    if key == "consts":
        name, ty = _split_decl(text)
        return t.with_consts(Const(name, parse_type(ty, t)))
    if key == "defs":
        if ":=" not in text:
            raise CttSyntaxError(f"definition needs ':=': {text!r}")
        head, body = text.split(":=", 1)
        name, ty = _split_decl(head)
        return definitional_extension(t, name, parse_type(ty, t), parse_expr(body, t))
    if key == "axioms":
        return add_axiom(t, parse_expr(text, t))
    raise CttSyntaxError(f"unknown section {key}")


def _split_decl(text: str) -> Tuple[str, str]:
    if ":" not in text:
        raise CttSyntaxError(f"expected 'name : TYPE', found {text!r}")
    name, ty = text.split(":", 1)
    return name.strip(), ty.strip()


def load_theory(path: str) -> Theory:
    with open(path) as fh:
        return parse_theory(fh.read(), path)


def _definitional(t: Theory) -> Dict[Expr, Tuple[Const, Expr]]:
    return {eq(c, d): (c, d) for c, d in t.definitions}


def write_theory(t: Theory) -> str:
    """Render a theory as a self-contained file (no ``extends``)."""
    defs = _definitional(t)
    defined = {c for c, _ in t.definitions}
    lines = [f"theory {t.name}"]
    if t.user_bases:
        lines.append("bases: " + " ".join(t.user_bases))
    plain = [c for c in t.consts if c not in defined]
    if plain:
        lines.append("consts:")
        lines += [f"  {c.name} : {c.ty}" for c in plain]
    current = None
    for a in t.axioms:
        key = "defs" if a in defs else "axioms"
        if key != current:
            lines.append(f"{key}:")
            current = key
        if key == "defs":
            c, d = defs[a]
            lines.append(f"  {c.name} : {c.ty} := {print_expr(d, t)}")
        else:
            lines.append(f"  {print_expr(a, t)}")
    return "\n".join(lines) + "\n"


def save_theory(t: Theory, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(write_theory(t))


# ---------------------------------------------------------------- translations

_TRANS_KEYS = ("source", "target", "mu", "nu", "nu_eq", "nu_iota")


def _split_map(text: str) -> Tuple[str, str]:
    if "=>" not in text:
        raise CttSyntaxError(f"expected 'LHS => RHS', found {text!r}")
    k = _top_level_arrow(text)
    return text[:k].strip(), text[k + 2 :].strip()


def _top_level_arrow(text: str) -> int:
    # the first '=>' not inside parentheses or brackets
    depth = 0
    for k in range(len(text) - 1):
        ch = text[k]
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif depth == 0 and text.startswith("=>", k) and (k == 0 or text[k - 1] not in "<="):
            return k
    raise CttSyntaxError(f"expected 'LHS => RHS', found {text!r}")


def _symbol(theory: Theory, text: str, want=None) -> Const:
    text = text.strip()
    name, ty = text, None
    if ":" in text:
        name, tytext = text.split(":", 1)
        name = name.strip()
        ty = parse_type(tytext, theory)
    found = [c for c in theory.consts_named(name) if ty is None or c.ty == ty]
    if want is not None and len(found) > 1:
        found = [c for c in found if c.ty == want]
    if len(found) != 1:
        what = "unknown" if not found else "ambiguous"
        raise UnknownSymbol(f"{what} constant {text!r} in {theory.name}")
    return found[0]


@dataclass
class _RawTranslation:
    name: str
    source: Theory
    target: Theory
    mu: List[Tuple[str, str, _Line]]
    nu: List[Tuple[str, str, _Line]]
    nu_eq: List[Tuple[str, str, _Line]]
    nu_iota: List[Tuple[str, str, _Line]]
    source_path: str
    target_path: str


def _read_raw(text: str, path: str) -> _RawTranslation:
    base_dir = os.path.dirname(os.path.abspath(path))
    name = os.path.splitext(os.path.basename(path))[0] if path != "<string>" else "translation"
    found: Dict[str, list] = {k: [] for k in _TRANS_KEYS}
    for key, entries in _sections(text, _TRANS_KEYS, path):
        if key == "translation":
            name = entries[0].text.strip()
            continue
        for line in entries:
            if key in ("source", "target"):
                found[key].append(line)
            else:
                lhs, rhs = _split_map(line.text)
                found[key].append((lhs, rhs, line))
    for key in ("source", "target"):
        if len(found[key]) != 1:
            raise CttSyntaxError(f"{path}: exactly one '{key}:' entry is required")
    src_path = os.path.join(base_dir, found["source"][0].text.strip())
    tgt_path = os.path.join(base_dir, found["target"][0].text.strip())
    return _RawTranslation(
        name,
        load_theory(src_path),
        load_theory(tgt_path),
        found["mu"],
        found["nu"],
        found["nu_eq"],
        found["nu_iota"],
        src_path,
        tgt_path,
    )


def _mu_value(target: Theory, text: str):
    ty = try_parse_type(text, target)
    if ty is not None:
        return ty
    return parse_expr(text, target)


def parse_translation(text: str, path: str = "<string>") -> Translation:
    raw = _read_raw(text, path)
    src, tgt = raw.source, raw.target
    mu = {}
    for b, rhs, line in raw.mu:
        try:
            v = _mu_value(tgt, rhs)
        except CttError as exc:
            raise _relocate(exc, path, line) from None
        mu[b] = v if isinstance(v, Expr) else true_pred(v)
    t = Translation(src, tgt, mu, name=raw.name)
    for lhs, rhs, line in raw.nu:
        try:
            c = _symbol(src, lhs)
            t.nu[c] = _symbol(tgt, rhs, want=t.tau_mu(c.ty))
        except CttError as exc:
            raise _relocate(exc, path, line) from None
    for key, table in (("nu_eq", t.nu_eq), ("nu_iota", t.nu_iota)):
        for lhs, rhs, line in getattr(raw, key):
            try:
                if lhs == "*":
                    setattr(t, "eq_family" if key == "nu_eq" else "iota_family", rhs.strip())
                    continue
                ty = parse_type(lhs, src)
                t2 = t.tau_mu(ty)
                want = Arrow(t2, Arrow(t2, O)) if key == "nu_eq" else Arrow(Arrow(t2, O), t2)
                table[ty] = _symbol(tgt, rhs, want=want)
            except CttError as exc:
                raise _relocate(exc, path, line) from None
    t.source_path, t.target_path = raw.source_path, raw.target_path
    return t


def load_translation(path: str) -> Translation:
    with open(path) as fh:
        return parse_translation(fh.read(), path)


def _sym_text(theory: Theory, c: Const) -> str:
    if len(theory.consts_named(c.name)) > 1:
        return f"{c.name}:{atomic_type(c.ty)}"
    return c.name


def write_translation(t: Translation, source_path: str, target_path: str) -> str:
    lines = [f"translation {t.name}", f"source: {source_path}", f"target: {target_path}"]
    for b in t.source.bases:
        p = t.mu[b]
        if b in ("o", "eps") and p == true_pred(Base(b)):
            continue
        lines.append(f"mu: {b} => {print_expr(p, t.target)}")
    for c, img in t.nu.items():
        lines.append(f"nu: {_sym_text(t.source, c)} => {_sym_text(t.target, img)}")
    for ty, img in t.nu_eq.items():
        lines.append(f"nu_eq: {ty} => {img.name}")
    for ty, img in t.nu_iota.items():
        lines.append(f"nu_iota: {ty} => {img.name}")
    if t.eq_family:
        lines.append(f"nu_eq: * => {t.eq_family}")
    if t.iota_family:
        lines.append(f"nu_iota: * => {t.iota_family}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- pre-translations


@dataclass
class PreTranslation:
    name: str
    source: Theory
    target: Theory
    mu: Dict[str, object]
    nu: Dict[Const, Expr]
    source_path: str
    target_path: str

    def elaborate(self, types=None):
        return elaborate_pretranslation(self.source, self.target, self.mu, self.nu, types)


def parse_pretranslation(text: str, path: str = "<string>") -> PreTranslation:
    raw = _read_raw(text, path)
    src, tgt = raw.source, raw.target
    mu: Dict[str, object] = {}
    nu: Dict[Const, Expr] = {}
    for b, rhs, line in raw.mu:
        try:
            mu[b] = _mu_value(tgt, rhs)
        except CttError as exc:
            raise _relocate(exc, path, line) from None
    for lhs, rhs, line in raw.nu:
        try:
            nu[_symbol(src, lhs)] = parse_expr(rhs, tgt)
        except CttError as exc:
            raise _relocate(exc, path, line) from None
    if raw.nu_eq or raw.nu_iota:
        raise CttSyntaxError(f"{path}: pre-translations derive nu_eq and nu_iota themselves")
    return PreTranslation(raw.name, src, tgt, mu, nu, raw.source_path, raw.target_path)


def load_pretranslation(path: str) -> PreTranslation:
    with open(path) as fh:
        return parse_pretranslation(fh.read(), path)


def write_elaboration(pre: PreTranslation, out_dir: str, types=None) -> Tuple[str, str]:
    """Elaborate ``pre`` and write the extended target theory and the
    translation into ``out_dir``.  Returns the two paths."""
    ext, trans = pre.elaborate(types)
    trans.name = pre.name
    os.makedirs(out_dir, exist_ok=True)
    theory_path = os.path.join(out_dir, f"{ext.name}.cttu")
    if ext is pre.target:
        target_ref = os.path.relpath(pre.target_path, out_dir)
    else:
        save_theory(ext, theory_path)
        target_ref = os.path.basename(theory_path)
    trans_path = os.path.join(out_dir, f"{pre.name}.cttr")
    with open(trans_path, "w") as fh:
        fh.write(write_translation(trans, os.path.relpath(pre.source_path, out_dir), target_ref))
    return (theory_path if ext is not pre.target else pre.target_path), trans_path


# ---------------------------------------------------------------- models


class _Literal:
    """Parser for value literals: integers, T, F, [[expr]] and graphs."""

    def __init__(self, text: str, theory: Theory):
        self.s = text
        self.i = 0
        self.theory = theory

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self, tok: str) -> bool:
        self.ws()
        return self.s.startswith(tok, self.i)

    def take(self, tok: str):
        if not self.peek(tok):
            raise CttSyntaxError(f"expected {tok!r} at {self.s[self.i:self.i + 12]!r}")
        self.i += len(tok)

    def end(self):
        self.ws()
        if self.i != len(self.s):
            raise CttSyntaxError(f"trailing text {self.s[self.i:]!r}")

    def scalar(self):
        self.ws()
        if self.peek("[["):
            start = self.i
            depth = 0
            while self.i < len(self.s):
                if self.s.startswith("[[", self.i):
                    depth += 1
                    self.i += 2
                elif self.s.startswith("]]", self.i):
                    depth -= 1
                    self.i += 2
                    if depth == 0:
                        return Construction(parse_expr(self.s[start + 2 : self.i - 2], self.theory))
                else:
                    self.i += 1
            raise CttSyntaxError("unterminated [[")
        m = re.compile(r"-?\d+|T\b|F\b").match(self.s, self.i)
        if m is None:
            raise CttSyntaxError(f"expected a value at {self.s[self.i:self.i + 12]!r}")
        self.i = m.end()
        tok = m.group()
        return True if tok == "T" else False if tok == "F" else int(tok)

    def graph(self):
        self.take("{")
        entries = []
        if self.peek("}"):
            self.take("}")
            return entries
        while True:
            if self.peek("("):
                self.take("(")
                args = [self.scalar()]
                while self.peek(","):
                    self.take(",")
                    args.append(self.scalar())
                self.take(")")
            else:
                args = [self.scalar()]
            self.take("->")
            entries.append((tuple(args), self.scalar()))
            if self.peek(","):
                self.take(",")
                continue
            self.take("}")
            return entries


def _convert(m: FiniteModel, raw, ty):
    if ty == O:
        if not isinstance(raw, bool):
            raise ModelError(f"expected T or F for type o, got {raw!r}")
        return raw
    if isinstance(ty, Base) and ty.name == "eps":
        if not isinstance(raw, Construction):
            raise ModelError("values of type eps are written [[expr]]")
        return raw
    if isinstance(ty, Base):
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ModelError(f"expected an element of {ty}, got {raw!r}")
        return m.indiv(ty.name, raw)
    raise ModelError(f"no scalar literal for type {ty}")


def _graph_table(m: FiniteModel, entries, ty) -> Table:
    args_tys = []
    cod = ty
    while isinstance(cod, Arrow):
        args_tys.append(cod.dom)
        cod = cod.cod
    arity = len(args_tys)
    graph = {}
    for args, val in entries:
        if len(args) != arity:
            raise ModelError(f"graph entry has {len(args)} arguments, expected {arity}")
        key = tuple(_convert(m, a, t) for a, t in zip(args, args_tys))
        if key in graph:
            raise ModelError(f"graph lists argument {args} twice")
        graph[key] = _convert(m, val, cod)

    def build(prefix, t):
        if not isinstance(t, Arrow):
            if prefix in graph:
                return graph[prefix]
            if t == O:
                raise ModelError(f"graphs into o must be total; missing {prefix}")
            return UNDEFINED
        return m.table(t, lambda d: build(prefix + (d,), t.cod))

    return build((), ty)


def parse_model(
    text: str, path: str = "<string>", theory: Optional[Theory] = None, eps_depth: Optional[int] = None
) -> FiniteModel:
    base_dir = os.path.dirname(os.path.abspath(path))
    name = os.path.splitext(os.path.basename(path))[0] if path != "<string>" else "model"
    carriers: Dict[str, int] = {}
    raw_consts: List[Tuple[str, str, _Line]] = []
    for key, entries in _sections(text, ("theory", "model"), path):
        for line in entries:
            if key == "theory":
                if theory is None:
                    theory = load_theory(os.path.join(base_dir, line.text.strip()))
            elif key == "model":
                name = line.text.strip()
            elif key == "carrier":
                m = re.fullmatch(r"([A-Za-z_][\w']*)\s*=\s*(\d+)", line.text)
                if m is None:
                    raise CttSyntaxError(f"{path}:{line.lineno}: expected 'carrier BASE = N'")
                carriers[m.group(1)] = int(m.group(2))
            elif key == "const":
                if "=" not in line.text:
                    raise CttSyntaxError(f"{path}:{line.lineno}: expected 'const NAME = VALUE'")
                lhs, rhs = line.text.split("=", 1)
                raw_consts.append((lhs.strip(), rhs.strip(), line))
    if theory is None:
        raise ModelError(f"{path}: no theory given")
    interp: Dict[Const, object] = {}
    probe = FiniteModel(theory, carriers, {}, partial=True)
    for lhs, rhs, line in raw_consts:
        try:
            c = _symbol(theory, lhs)
            lit = _Literal(rhs, theory)
            if lit.peek("{"):
                value = _graph_table(probe, lit.graph(), c.ty)
            else:
                value = _convert(probe, lit.scalar(), c.ty)
            lit.end()
            interp[c] = value
        except CttError as exc:
            raise _relocate(exc, path, line) from None
    return FiniteModel(theory, carriers, interp, eps_depth=eps_depth, name=name)


def load_model(path: str, theory: Optional[Theory] = None, eps_depth: Optional[int] = None) -> FiniteModel:
    with open(path) as fh:
        return parse_model(fh.read(), path, theory, eps_depth)


def write_model(m: FiniteModel, theory_path: Optional[str] = None) -> str:
    lines = []
    if theory_path:
        lines.append(f"theory: {theory_path}")
    for b, n in m.carriers.items():
        lines.append(f"carrier {b} = {n}")
    for c, v in m.interp.items():
        lines.append(f"const {_sym_text(m.theory, c)} = {_literal(m, v, c.ty)}")
    return "\n".join(lines) + "\n"


def _scalar_text(v) -> str:
    if v is True:
        return "T"
    if v is False:
        return "F"
    if isinstance(v, Indiv):
        return str(v.index)
    if isinstance(v, Construction):
        return f"[[{print_expr(v.decoded)}]]"
    raise ModelError(f"no literal for {v!r}")


def _literal(m: FiniteModel, v, ty) -> str:
    if not isinstance(ty, Arrow):
        return _scalar_text(v)
    entries = []

    def walk(prefix, val, t):
        if not isinstance(t, Arrow):
            if val is not UNDEFINED:
                entries.append((prefix, val))
            return
        for d in m.domain(t.dom):
            walk(prefix + (d,), m.apply_table(val, d), t.cod)

    walk((), v, ty)
    parts = []
    for args, val in entries:
        lhs = _scalar_text(args[0]) if len(args) == 1 else "(" + ", ".join(_scalar_text(a) for a in args) + ")"
        parts.append(f"{lhs} -> {_scalar_text(val)}")
    return "{" + ", ".join(parts) + "}"
