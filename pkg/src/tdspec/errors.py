"""Exception hierarchy shared by every stage of the tool chain."""

from __future__ import annotations


class TdSpecError(Exception):
    """Base class; ``kind`` is the machine-readable tag used by ``--json-errors``."""

    kind = "error"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "message": str(self)}


class ParseError(TdSpecError):
    kind = "parse-error"

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})" if line else message)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "message": str(self), "line": self.line, "column": self.column}


class UndeclaredVariableError(ParseError):
    kind = "undeclared-variable"

    def __init__(self, name: str, line: int = 0, column: int = 0):
        self.name = name
        super().__init__(f"undeclared variable {name!r}", line, column)


class FragmentError(TdSpecError):
    kind = "fragment-violation"


class SpecError(TdSpecError):
    """Elaboration problems: duplicates, unresolved names, bad constants."""

    kind = "spec-error"


class AlphabetMismatchError(TdSpecError):
    kind = "alphabet-mismatch"


class NotTotalError(TdSpecError):
    kind = "not-total"


class TraceFormatError(TdSpecError):
    kind = "trace-format"


class ResourceLimitError(TdSpecError):
    kind = "resource-limit"

    def __init__(self, message: str, path: tuple = ()):
        self.path = tuple(path)
        if self.path:
            message = f"{message} at subformula path {'/'.join(map(str, self.path))}"
        super().__init__(message)


class UnrealizableError(TdSpecError):
    kind = "unrealizable"

    def __init__(self, message: str, explanation=None):
        self.explanation = explanation
        super().__init__(message)
