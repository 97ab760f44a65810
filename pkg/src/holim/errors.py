from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .syntax import SourceSpan


@dataclass
class Diagnostic:
    code: str
    message: str
    span: Optional[SourceSpan] = None
    decl: Optional[str] = None
    severity: str = "error"

    def render(self) -> str:
        where = str(self.span) if self.span else "<unknown>"
        msg = self.message
        if self.decl:
            msg = f"in `{self.decl}`: {msg}"
        return f"{where}: {self.severity}[{self.code}]: {msg}"


class HolimError(Exception):
    """Base class for every diagnostic raised by the checker."""

    code = "E-INTERNAL"

    def __init__(self, message: str, span: Optional[SourceSpan] = None,
                 decl: Optional[str] = None, code: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.span = span
        self.decl = decl
        if code is not None:
            self.code = code

    @property
    def diagnostic(self) -> Diagnostic:
        return Diagnostic(self.code, self.message, self.span, self.decl)

    def __str__(self):
        return self.diagnostic.render()


class LexError(HolimError):
    code = "E-LEX"


class ParseError(HolimError):
    code = "E-PARSE"

    def __init__(self, message, span=None, expected=(), **kw):
        super().__init__(message, span, **kw)
        self.expected = frozenset(expected)


class TypeCheckError(HolimError):
    """Kernel rejection. ``code`` is one of E-TYPE, E-NOTFN, E-UNIVERSE."""

    code = "E-TYPE"


class ElabError(HolimError):
    """Elaboration failure: E-UNRESOLVED, E-UNIFY, E-OCCURS, E-UNSOLVED."""

    code = "E-UNIFY"


class DuplicateError(HolimError):
    code = "E-DUPLICATE"


class MissingError(HolimError):
    code = "E-MISSING"
