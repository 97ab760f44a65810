"""Render core terms in surface syntax."""

from __future__ import annotations

from . import syntax as S
from .parser import print_term
from .surface import (Group, SApp, SArrow, SExplicit, SKw, SLam, SMetaRef, SPair, SPi, SProd, SSigma,
                      STerm, SType, SVar)

_CONST_NAMES = {
    S.Nat: "Nat", S.Zero: "zero", S.Unit: "Unit", S.Star: "star", S.Empty: "Empty",
    S.Bool: "Bool", S.TrueT: "true", S.FalseT: "false",
}


def _occurs(t: S.Term, index: int) -> bool:
    if isinstance(t, S.Var):
        return t.index == index
    return any(_occurs(c, index + extra) for c, extra in S.children(t))


def _fresh(name: str, taken) -> str:
    if name == "_" or name not in taken:
        return name
    i = 1
    while f"{name}{i}" in taken:
        i += 1
    return f"{name}{i}"


def _app(head: str, *args: STerm) -> STerm:
    t: STerm = SKw(head)
    for a in args:
        t = SApp(t, a)
    return t


def _has_implicits(ty: S.Term) -> bool:
    while isinstance(ty, S.Pi):
        if ty.implicit:
            return True
        ty = ty.codomain
    return False


class _Resugar:
    def __init__(self, avoid, env=None):
        self.avoid = set(avoid)
        self.env = env

    def binder(self, name, names, body, used=True):
        if not used:
            return "_"
        if name == "_" or not name.isidentifier():
            name = "x"
        return _fresh(name, self.avoid | set(names))

    def go(self, t: S.Term, names: tuple) -> STerm:
        tp = type(t)
        if tp is S.Var:
            if t.index < len(names):
                return SVar(names[-1 - t.index])
            return SVar(f"#{t.index}")
        if tp is S.Global:
            entry = self.env.get(t.name) if self.env is not None else None
            if entry is not None and _has_implicits(entry.type_term):
                return SExplicit(t.name)
            return SVar(t.name)
        if tp is S.Meta:
            return SMetaRef(t.id)
        if tp is S.Universe:
            return SType(t.level)
        if tp in _CONST_NAMES:
            return SKw(_CONST_NAMES[tp])
        if tp is S.App:
            return SApp(self.go(t.fn, names), self.go(t.arg, names))
        if tp is S.Lambda:
            groups = []
            while isinstance(t, S.Lambda):
                x = self.binder(t.name, names, t.body, _occurs(t.body, 0))
                dom = self.go(t.domain, names) if t.domain is not None else None
                groups.append(Group((x,), dom, t.implicit))
                names = names + (x,)
                t = t.body
            return SLam(tuple(groups), self.go(t, names))
        if tp is S.Pi:
            if not t.implicit and not _occurs(t.codomain, 0):
                return SArrow(self.go(t.domain, names), self.go(t.codomain, names + ("_",)))
            groups = []
            while isinstance(t, S.Pi) and (t.implicit or _occurs(t.codomain, 0)):
                x = self.binder(t.name, names, t.codomain)
                groups.append(Group((x,), self.go(t.domain, names), t.implicit))
                names = names + (x,)
                t = t.codomain
            return SPi(tuple(groups), self.go(t, names))
        if tp is S.Sigma:
            if not _occurs(t.second, 0):
                return SProd(self.go(t.first, names), self.go(t.second, names + ("_",)))
            x = self.binder(t.name, names, t.second)
            return SSigma((Group((x,), self.go(t.first, names)),), self.go(t.second, names + (x,)))
        if tp is S.Pair:
            ann = self.go(t.ann, names) if t.ann is not None else None
            return SPair(self.go(t.fst, names), self.go(t.snd, names), ann)
        if tp is S.Fst:
            return _app("fst", self.go(t.pair, names))
        if tp is S.Snd:
            return _app("snd", self.go(t.pair, names))
        if tp is S.Succ:
            return _app("succ", self.go(t.pred, names))
        args = [self.go(c, names) for c, _ in S.children(t)]
        kw = {S.Id: "Id", S.Refl: "refl", S.J: "J", S.NatRec: "natrec", S.UnitRec: "unitrec",
              S.EmptyRec: "emptyrec", S.BoolRec: "boolrec"}[tp]
        return _app(kw, *args)


def to_surface(t: S.Term, names: tuple = (), env=None) -> STerm:
    """Convert a core term to a surface tree, inventing non-clashing binder names.

    Given the global environment, heads with implicit parameters are marked
    with ``@`` so that the printed text elaborates back to the same term.
    """
    return _Resugar(S.globals_of(t) | set(names), env).go(t, tuple(names))


def show_term(t: S.Term, names: tuple = (), env=None) -> str:
    return print_term(to_surface(t, names, env))
