"""Church's type theory with undefinedness, quotation and evaluation."""

from .errors import CttError, CttSyntaxError
from .files import (
    load_model,
    load_pretranslation,
    load_theory,
    load_translation,
    parse_model,
    parse_theory,
    parse_translation,
    write_elaboration,
    write_theory,
)
from .model import (
    UNDEFINED,
    FiniteModel,
    check_formula,
    check_obligations,
    check_theory,
    is_valid,
    valuate,
)
from .parser import parse_expr, parse_type
from .printer import print_expr
from .quotation import Construction, decode, encode, is_construction
from .syntax import EPS, O, Abs, App, Arrow, Base, Cond, Const, Eval, Quote, Var, arrow, type_of
from .theory import Theory, add_axiom, check_normal, definitional_extension, occurring_types
from .translation import (
    Translation,
    check_translation,
    elaborate_pretranslation,
    mu_bar,
    nu_bar,
    obligations,
)

__all__ = [
    "Abs",
    "App",
    "Arrow",
    "Base",
    "Cond",
    "Const",
    "Construction",
    "CttError",
    "CttSyntaxError",
    "EPS",
    "Eval",
    "FiniteModel",
    "O",
    "Quote",
    "Theory",
    "Translation",
    "UNDEFINED",
    "Var",
    "add_axiom",
    "arrow",
    "check_formula",
    "check_normal",
    "check_obligations",
    "check_theory",
    "check_translation",
    "decode",
    "definitional_extension",
    "elaborate_pretranslation",
    "encode",
    "is_construction",
    "is_valid",
    "load_model",
    "load_pretranslation",
    "load_theory",
    "load_translation",
    "mu_bar",
    "nu_bar",
    "obligations",
    "occurring_types",
    "parse_expr",
    "parse_model",
    "parse_theory",
    "parse_translation",
    "parse_type",
    "print_expr",
    "type_of",
    "valuate",
    "write_elaboration",
    "write_theory",
]
