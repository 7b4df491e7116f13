"""Exception hierarchy shared by every layer of the kernel."""


class CttError(Exception):
    """Base class for all kernel errors."""


class TypeMismatch(CttError):
    pass


class QuoteNotEvalFree(CttError):
    pass


class NotEvalFree(CttError):
    pass


class NotAConstruction(CttError):
    pass


class DefiniteDescrAtO(CttError):
    pass


class NotAFormula(CttError):
    pass


class NotInLanguage(CttError):
    pass


class NotSemanticallyClosed(CttError):
    pass


class DuplicateConstant(CttError):
    pass


class UnknownBaseType(CttError):
    pass


class NotAPredicate(CttError):
    pass


class NotInSourceLanguage(CttError):
    pass


class MissingConstantMapping(CttError):
    pass


class NameCollision(CttError):
    pass


class EpsEnumeration(CttError):
    pass


class Undecided(CttError):
    """The finite-model checker could neither validate nor genuinely refute."""


class ModelError(CttError):
    pass


class UnknownSymbol(CttError):
    pass


class CttSyntaxError(CttError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" at line {line}, column {column}"
        super().__init__(f"{message}{where}")
