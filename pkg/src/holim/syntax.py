"""Core term language.

Variables are de Bruijn indices; binder names are carried only so that terms
can be printed back in readable form.  Two terms that differ only in binder
names compare unequal as Python objects, so use :func:`alpha_eq` when that
matters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        if (self.line, self.col) > (self.end_line, self.end_col):
            raise ValueError(f"span start after end: {self}")

    def __str__(self):
        return f"{self.file}:{self.line}:{self.col}"

    def to(self, other: "SourceSpan") -> "SourceSpan":
        return SourceSpan(self.file, self.line, self.col, other.end_line, other.end_col)


# --- terms -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Var:
    index: int


@dataclass(frozen=True, slots=True)
class Universe:
    level: int


@dataclass(frozen=True, slots=True)
class Pi:
    name: str
    domain: "Term"
    codomain: "Term"
    implicit: bool = False


@dataclass(frozen=True, slots=True)
class Lambda:
    name: str
    body: "Term"
    # Optional domain annotation; lets the kernel infer the type of a
    # lambda in head position (used by the ``let`` desugaring).
    domain: Optional["Term"] = None
    implicit: bool = False


@dataclass(frozen=True, slots=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True, slots=True)
class Sigma:
    name: str
    first: "Term"
    second: "Term"


@dataclass(frozen=True, slots=True)
class Pair:
    fst: "Term"
    snd: "Term"
    # Optional Sigma annotation, needed only when the pair must be inferred.
    ann: Optional["Term"] = None


@dataclass(frozen=True, slots=True)
class Fst:
    pair: "Term"


@dataclass(frozen=True, slots=True)
class Snd:
    pair: "Term"


@dataclass(frozen=True, slots=True)
class Id:
    type: "Term"
    lhs: "Term"
    rhs: "Term"


@dataclass(frozen=True, slots=True)
class Refl:
    type: "Term"
    point: "Term"


@dataclass(frozen=True, slots=True)
class J:
    motive: "Term"
    base: "Term"
    lhs: "Term"
    rhs: "Term"
    path: "Term"


@dataclass(frozen=True, slots=True)
class Nat:
    pass


@dataclass(frozen=True, slots=True)
class Zero:
    pass


@dataclass(frozen=True, slots=True)
class Succ:
    pred: "Term"


@dataclass(frozen=True, slots=True)
class NatRec:
    motive: "Term"
    zero_case: "Term"
    succ_case: "Term"
    scrutinee: "Term"


@dataclass(frozen=True, slots=True)
class Unit:
    pass


@dataclass(frozen=True, slots=True)
class Star:
    pass


@dataclass(frozen=True, slots=True)
class UnitRec:
    motive: "Term"
    star_case: "Term"
    scrutinee: "Term"


@dataclass(frozen=True, slots=True)
class Empty:
    pass


@dataclass(frozen=True, slots=True)
class EmptyRec:
    motive: "Term"
    scrutinee: "Term"


@dataclass(frozen=True, slots=True)
class Bool:
    pass


@dataclass(frozen=True, slots=True)
class TrueT:
    pass


@dataclass(frozen=True, slots=True)
class FalseT:
    pass


@dataclass(frozen=True, slots=True)
class BoolRec:
    motive: "Term"
    true_case: "Term"
    false_case: "Term"
    scrutinee: "Term"


@dataclass(frozen=True, slots=True)
class Global:
    name: str


@dataclass(frozen=True, slots=True)
class Meta:
    id: int


Term = Union[
    Var, Universe, Pi, Lambda, App, Sigma, Pair, Fst, Snd, Id, Refl, J,
    Nat, Zero, Succ, NatRec, Unit, Star, UnitRec, Empty, EmptyRec,
    Bool, TrueT, FalseT, BoolRec, Global, Meta,
]

NAT, ZERO, UNIT, STAR, EMPTY, BOOL, TRUE, FALSE = (
    Nat(), Zero(), Unit(), Star(), Empty(), Bool(), TrueT(), FalseT()
)
ATOMS = (Nat, Zero, Unit, Star, Empty, Bool, TrueT, FalseT, Universe, Global, Meta)


@dataclass
class Declaration:
    name: str
    type: Term
    body: Optional[Term] = None
    span: Optional[SourceSpan] = field(default=None, compare=False)

    @property
    def is_axiom(self) -> bool:
        return self.body is None


# --- generic traversal --------------------------------------------------------

# For each node class: the child fields and how many binders each child sits
# under, relative to the node itself.
_CHILDREN: dict[type, tuple[tuple[str, int], ...]] = {
    Pi: (("domain", 0), ("codomain", 1)),
    Lambda: (("domain", 0), ("body", 1)),
    App: (("fn", 0), ("arg", 0)),
    Sigma: (("first", 0), ("second", 1)),
    Pair: (("fst", 0), ("snd", 0), ("ann", 0)),
    Fst: (("pair", 0),),
    Snd: (("pair", 0),),
    Id: (("type", 0), ("lhs", 0), ("rhs", 0)),
    Refl: (("type", 0), ("point", 0)),
    J: (("motive", 0), ("base", 0), ("lhs", 0), ("rhs", 0), ("path", 0)),
    Succ: (("pred", 0),),
    NatRec: (("motive", 0), ("zero_case", 0), ("succ_case", 0), ("scrutinee", 0)),
    UnitRec: (("motive", 0), ("star_case", 0), ("scrutinee", 0)),
    EmptyRec: (("motive", 0), ("scrutinee", 0)),
    BoolRec: (("motive", 0), ("true_case", 0), ("false_case", 0), ("scrutinee", 0)),
}


def children(t: Term):
    """Yield ``(child, binders_added)`` for every non-None child of ``t``."""
    for name, extra in _CHILDREN.get(type(t), ()):
        c = getattr(t, name)
        if c is not None:
            yield c, extra


def map_children(t: Term, fn) -> Term:
    """Rebuild ``t`` with ``fn(child, binders_added)`` applied to each child."""
    spec = _CHILDREN.get(type(t))
    if not spec:
        return t
    kwargs = {}
    changed = False
    for name, extra in spec:
        c = getattr(t, name)
        if c is None:
            continue
        new = fn(c, extra)
        if new is not c:
            changed = True
        kwargs[name] = new
    if not changed:
        return t
    import dataclasses

    return dataclasses.replace(t, **kwargs)


def well_scoped(t: Term, depth: int) -> bool:
    """True iff every variable is bound within ``depth`` and no Meta occurs."""
    if isinstance(t, Var):
        return 0 <= t.index < depth
    if isinstance(t, Meta):
        return False
    return all(well_scoped(c, depth + extra) for c, extra in children(t))


def shift(t: Term, cutoff: int, amount: int) -> Term:
    """Add ``amount`` to every free index ``>= cutoff``."""
    if amount == 0:
        return t
    if isinstance(t, Var):
        return Var(t.index + amount) if t.index >= cutoff else t
    if isinstance(t, ATOMS):
        return t
    return map_children(t, lambda c, extra: shift(c, cutoff + extra, amount))


def subst(t: Term, index: int, replacement: Term) -> Term:
    """Substitute ``replacement`` for ``Var(index)`` and close the gap.

    Indices above ``index`` are lowered by one, so this is the operation used
    for beta reduction: ``subst(body, 0, arg)``.
    """

    def go(t: Term, depth: int) -> Term:
        if isinstance(t, Var):
            k = t.index
            if k == index + depth:
                return shift(replacement, 0, depth)
            if k > index + depth:
                return Var(k - 1)
            return t
        if isinstance(t, ATOMS):
            return t
        return map_children(t, lambda c, extra: go(c, depth + extra))

    return go(t, 0)


def has_meta(t: Term) -> bool:
    if isinstance(t, Meta):
        return True
    return any(has_meta(c) for c, _ in children(t))


def metas_of(t: Term) -> set[int]:
    out: set[int] = set()

    def go(t):
        if isinstance(t, Meta):
            out.add(t.id)
        for c, _ in children(t):
            go(c)

    go(t)
    return out


def globals_of(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Global):
            out.add(u.name)
        else:
            stack.extend(c for c, _ in children(u))
    return out


def size(t: Term) -> int:
    n = 0
    stack = [t]
    while stack:
        u = stack.pop()
        n += 1
        stack.extend(c for c, _ in children(u))
    return n


def erase_names(t: Term) -> Term:
    """Normalise binder names so that alpha-equivalent terms compare equal."""
    import dataclasses

    if isinstance(t, (Pi, Lambda, Sigma)):
        t = dataclasses.replace(t, name="_")
    if isinstance(t, Pi):
        t = dataclasses.replace(t, implicit=False)
    if isinstance(t, Lambda):
        t = dataclasses.replace(t, implicit=False)
    return map_children(t, lambda c, _: erase_names(c))


def alpha_eq(a: Term, b: Term) -> bool:
    return erase_names(a) == erase_names(b)


def nat_literal(n: int) -> Term:
    t: Term = ZERO
    for _ in range(n):
        t = Succ(t)
    return t
