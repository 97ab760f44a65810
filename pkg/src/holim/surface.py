"""Surface syntax tree produced by the parser.

Variables are names.  Spans are carried for diagnostics but excluded from
equality, so two parses of the same text compare equal regardless of layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .syntax import SourceSpan

# Keywords that form atoms.  Each eliminator-like keyword has a fixed arity;
# the elaborator eta-expands partial applications.
PRIM_ARITY = {
    "fst": 1, "snd": 1, "Id": 3, "refl": 2, "J": 5, "succ": 1,
    "natrec": 4, "unitrec": 3, "emptyrec": 2, "boolrec": 4,
}
CONSTANTS = ("Nat", "zero", "Unit", "star", "Empty", "Bool", "true", "false")
KEYWORDS = frozenset(
    ("def", "axiom", "fun", "Pi", "Sigma", "Type", "let", "in", "import")
    + CONSTANTS + tuple(PRIM_ARITY)
)


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SVar:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SExplicit:
    """``@f``: a global or local used without implicit-argument insertion."""

    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SHole:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SKw:
    """A keyword atom: a constant such as ``Nat`` or a primitive such as ``J``."""

    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SType:
    level: int
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SNum:
    value: int
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SMetaRef:
    """Display-only reference to an elaboration metavariable."""

    id: int
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SApp:
    fn: "STerm"
    arg: "STerm"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Group:
    """A binder group: ``x``, ``{x}``, ``(x y : A)`` or ``{x y : A}``."""

    names: tuple
    type: Optional["STerm"] = None
    implicit: bool = False


@dataclass(frozen=True)
class SLam:
    binders: tuple
    body: "STerm"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SPi:
    binders: tuple
    codomain: "STerm"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SSigma:
    binders: tuple
    second: "STerm"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SArrow:
    domain: "STerm"
    codomain: "STerm"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SProd:
    first: "STerm"
    second: "STerm"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SPair:
    fst: "STerm"
    snd: "STerm"
    ann: Optional["STerm"] = None
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SAnn:
    term: "STerm"
    type: "STerm"
    span: Optional[SourceSpan] = _span()


STerm = Union[SVar, SExplicit, SHole, SKw, SType, SNum, SMetaRef, SApp, SLam, SPi, SSigma,
              SArrow, SProd, SPair, SAnn]


@dataclass(frozen=True)
class SDecl:
    kind: str  # "def" or "axiom"
    name: str
    params: tuple
    type: STerm
    body: Optional[STerm] = None
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SImport:
    module: str
    span: Optional[SourceSpan] = _span()


@dataclass
class SurfaceFile:
    path: str
    imports: list
    decls: list
