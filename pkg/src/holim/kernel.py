"""Normalization by evaluation, conversion and bidirectional type checking.

Global definitions are *glued*: evaluating ``Global(name)`` yields a neutral
value headed by the name that also carries a lazily computed unfolding.
Forcing a value (:meth:`Evaluator.force`) always unfolds, so semantically every
definition is transparent; keeping the head around only lets conversion try a
cheap comparison of identical heads first and keeps printed types readable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from . import syntax as S
from .errors import DuplicateError, TypeCheckError
from .syntax import Declaration, SourceSpan, Term

DEFAULT_MAX_LEVEL = 3


# --- values --------------------------------------------------------------------


class Lazy:
    __slots__ = ("fn", "val")

    def __init__(self, fn=None, val=None):
        self.fn = fn
        self.val = val

    def force(self):
        if self.fn is not None:
            self.val = self.fn()
            self.fn = None
        return self.val


class Closure:
    __slots__ = ()

    def apply(self, v: "Value") -> "Value":  # pragma: no cover - interface
        raise NotImplementedError


class TermClosure(Closure):
    __slots__ = ("ev", "env", "term")

    def __init__(self, ev: "Evaluator", env: tuple, term: Term):
        self.ev = ev
        self.env = env
        self.term = term

    def apply(self, v):
        return self.ev.eval(self.env + (v,), self.term)


class FunClosure(Closure):
    __slots__ = ("fn",)

    def __init__(self, fn: Callable[["Value"], "Value"]):
        self.fn = fn

    def apply(self, v):
        return self.fn(v)


class ConstClosure(Closure):
    __slots__ = ("val",)

    def __init__(self, val):
        self.val = val

    def apply(self, v):
        return self.val


class VU:
    __slots__ = ("level",)

    def __init__(self, level: int):
        self.level = level

    def __repr__(self):
        return f"VU({self.level})"


class VPi:
    __slots__ = ("name", "dom", "cod", "implicit")

    def __init__(self, name, dom, cod: Closure, implicit=False):
        self.name = name
        self.dom = dom
        self.cod = cod
        self.implicit = implicit


class VLam:
    __slots__ = ("name", "body", "implicit")

    def __init__(self, name, body: Closure, implicit=False):
        self.name = name
        self.body = body
        self.implicit = implicit


class VSigma:
    __slots__ = ("name", "fst", "snd")

    def __init__(self, name, fst, snd: Closure):
        self.name = name
        self.fst = fst
        self.snd = snd


class VPair:
    __slots__ = ("fst", "snd")

    def __init__(self, fst, snd):
        self.fst = fst
        self.snd = snd


class VId:
    __slots__ = ("type", "lhs", "rhs")

    def __init__(self, type, lhs, rhs):
        self.type = type
        self.lhs = lhs
        self.rhs = rhs


class VRefl:
    __slots__ = ("type", "point")

    def __init__(self, type, point):
        self.type = type
        self.point = point


class VSucc:
    __slots__ = ("pred",)

    def __init__(self, pred):
        self.pred = pred


class _Const:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


VNat = _Const("VNat")
VZero = _Const("VZero")
VUnit = _Const("VUnit")
VStar = _Const("VStar")
VEmpty = _Const("VEmpty")
VBool = _Const("VBool")
VTrue = _Const("VTrue")
VFalse = _Const("VFalse")

_CONST_TERMS = {
    S.Nat: VNat, S.Zero: VZero, S.Unit: VUnit, S.Star: VStar,
    S.Empty: VEmpty, S.Bool: VBool, S.TrueT: VTrue, S.FalseT: VFalse,
}
_CONST_QUOTE = {v: t() for t, v in _CONST_TERMS.items()}


# neutral heads


@dataclass(frozen=True, slots=True)
class HVar:
    level: int


@dataclass(frozen=True, slots=True)
class HGlobal:
    name: str


@dataclass(frozen=True, slots=True)
class HMeta:
    id: int


# spine frames


class FApp:
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg


class FFst:
    __slots__ = ()


class FSnd:
    __slots__ = ()


FST, SND = FFst(), FSnd()


class FJ:
    __slots__ = ("motive", "base", "lhs", "rhs")

    def __init__(self, motive, base, lhs, rhs):
        self.motive = motive
        self.base = base
        self.lhs = lhs
        self.rhs = rhs


class FNatRec:
    __slots__ = ("motive", "zero", "succ")

    def __init__(self, motive, zero, succ):
        self.motive = motive
        self.zero = zero
        self.succ = succ


class FUnitRec:
    __slots__ = ("motive", "star")

    def __init__(self, motive, star):
        self.motive = motive
        self.star = star


class FBoolRec:
    __slots__ = ("motive", "true", "false")

    def __init__(self, motive, true, false):
        self.motive = motive
        self.true = true
        self.false = false


class FEmptyRec:
    __slots__ = ("motive",)

    def __init__(self, motive):
        self.motive = motive


class VNe:
    """A value stuck on a head, with pending eliminations.

    ``glued`` is set for heads that are global definitions (or solved
    metavariables); it computes the unfolded value on demand.
    """

    __slots__ = ("head", "spine", "glued")

    def __init__(self, head, spine: tuple = (), glued: Optional[Lazy] = None):
        self.head = head
        self.spine = spine
        self.glued = glued

    def __repr__(self):
        return f"VNe({self.head}, {len(self.spine)} frames)"


Value = object


def vvar(level: int) -> VNe:
    return VNe(HVar(level))


class KernelBug(Exception):
    """Raised when evaluation meets a shape that well-typed input cannot produce."""


# --- global environment --------------------------------------------------------


@dataclass
class GlobalEntry:
    name: str
    type_term: Term
    body_term: Optional[Term]
    type_value: Value
    value: Optional[Lazy]
    span: Optional[SourceSpan] = None

    @property
    def is_axiom(self):
        return self.body_term is None


class GlobalEnv:
    """Dependency-ordered, append-only map of checked declarations."""

    def __init__(self, entries: Optional[dict] = None):
        self._entries: dict[str, GlobalEntry] = dict(entries or {})

    def __contains__(self, name):
        return name in self._entries

    def __getitem__(self, name) -> GlobalEntry:
        return self._entries[name]

    def get(self, name):
        return self._entries.get(name)

    def __len__(self):
        return len(self._entries)

    def names(self):
        return list(self._entries)

    def entries(self):
        return list(self._entries.values())

    def add(self, entry: GlobalEntry):
        if entry.name in self._entries:
            raise DuplicateError(f"duplicate declaration `{entry.name}`", entry.span, entry.name)
        self._entries[entry.name] = entry

    def extended(self, entry: GlobalEntry) -> "GlobalEnv":
        new = GlobalEnv(self._entries)
        new.add(entry)
        return new

    def copy(self) -> "GlobalEnv":
        return GlobalEnv(self._entries)


# --- evaluation ----------------------------------------------------------------


class Evaluator:
    def __init__(self, globals: GlobalEnv, metas=None):
        self.globals = globals
        self.metas = metas

    # eval

    def eval(self, env: tuple, t: Term) -> Value:
        tp = type(t)
        if tp is S.Var:
            return env[-1 - t.index]
        if tp is S.App:
            return self.apply(self.eval(env, t.fn), self.eval(env, t.arg))
        if tp is S.Global:
            return self.eval_global(t.name)
        if tp is S.Lambda:
            return VLam(t.name, TermClosure(self, env, t.body), t.implicit)
        if tp is S.Pi:
            return VPi(t.name, self.eval(env, t.domain), TermClosure(self, env, t.codomain), t.implicit)
        if tp is S.Sigma:
            return VSigma(t.name, self.eval(env, t.first), TermClosure(self, env, t.second))
        if tp is S.Pair:
            return VPair(self.eval(env, t.fst), self.eval(env, t.snd))
        if tp is S.Fst:
            return self.fst(self.eval(env, t.pair))
        if tp is S.Snd:
            return self.snd(self.eval(env, t.pair))
        if tp is S.Id:
            return VId(self.eval(env, t.type), self.eval(env, t.lhs), self.eval(env, t.rhs))
        if tp is S.Refl:
            return VRefl(self.eval(env, t.type), self.eval(env, t.point))
        if tp is S.J:
            frame = FJ(self.eval(env, t.motive), self.eval(env, t.base),
                       self.eval(env, t.lhs), self.eval(env, t.rhs))
            return self.elim(self.eval(env, t.path), frame)
        if tp is S.Universe:
            return VU(t.level)
        if tp in _CONST_TERMS:
            return _CONST_TERMS[tp]
        if tp is S.Succ:
            return VSucc(self.eval(env, t.pred))
        if tp is S.NatRec:
            frame = FNatRec(self.eval(env, t.motive), self.eval(env, t.zero_case),
                            self.eval(env, t.succ_case))
            return self.elim(self.eval(env, t.scrutinee), frame)
        if tp is S.BoolRec:
            frame = FBoolRec(self.eval(env, t.motive), self.eval(env, t.true_case),
                             self.eval(env, t.false_case))
            return self.elim(self.eval(env, t.scrutinee), frame)
        if tp is S.UnitRec:
            frame = FUnitRec(self.eval(env, t.motive), self.eval(env, t.star_case))
            return self.elim(self.eval(env, t.scrutinee), frame)
        if tp is S.EmptyRec:
            return self.elim(self.eval(env, t.scrutinee), FEmptyRec(self.eval(env, t.motive)))
        if tp is S.Meta:
            return self.eval_meta(env, t.id)
        raise KernelBug(f"cannot evaluate {t!r}")

    def eval_global(self, name: str) -> Value:
        entry = self.globals.get(name)
        if entry is None:
            raise TypeCheckError(f"unknown global `{name}`", code="E-TYPE")
        return VNe(HGlobal(name), (), entry.value)

    def eval_meta(self, env: tuple, mid: int) -> Value:
        if self.metas is None:
            raise KernelBug(f"metavariable ?{mid} reached the kernel")
        # metas are closed; they are applied to the context explicitly
        return self.meta_value(mid)

    def meta_value(self, mid: int) -> Value:
        meta = self.metas[mid]
        if meta.solution is None:
            return VNe(HMeta(mid))
        if meta.value is None:
            meta.value = self.eval((), meta.solution)
        return meta.value

    # eliminators

    def apply(self, f: Value, a: Value) -> Value:
        tf = type(f)
        if tf is VLam:
            return f.body.apply(a)
        if tf is VNe:
            return self._extend(f, FApp(a))
        raise KernelBug(f"applying a non-function value {f!r}")

    def apply_many(self, f, *args):
        for a in args:
            f = self.apply(f, a)
        return f

    def fst(self, v):
        if type(v) is VPair:
            return v.fst
        if type(v) is VNe:
            return self._extend(v, FST)
        raise KernelBug(f"fst of {v!r}")

    def snd(self, v):
        if type(v) is VPair:
            return v.snd
        if type(v) is VNe:
            return self._extend(v, SND)
        raise KernelBug(f"snd of {v!r}")

    def elim(self, v: Value, frame) -> Value:
        ft = type(frame)
        if ft is FApp:
            return self.apply(v, frame.arg)
        if ft is FFst:
            return self.fst(v)
        if ft is FSnd:
            return self.snd(v)
        tv = type(v)
        if tv is VNe:
            return self._extend(v, frame)
        if ft is FJ:
            if tv is VRefl:
                return self.apply(frame.base, frame.lhs)
        elif ft is FNatRec:
            if v is VZero:
                return frame.zero
            if tv is VSucc:
                return self.apply(self.apply(frame.succ, v.pred), self.elim(v.pred, frame))
        elif ft is FBoolRec:
            if v is VTrue:
                return frame.true
            if v is VFalse:
                return frame.false
        elif ft is FUnitRec:
            if v is VStar:
                return frame.star
        raise KernelBug(f"eliminator {ft.__name__} stuck on {v!r}")

    def _extend(self, ne: VNe, frame) -> VNe:
        g = ne.glued
        if g is None:
            head = ne.head
            if type(head) is HMeta and self.metas is not None and self.metas[head.id].solution is not None:
                return self.elim(self.force(ne), frame)
            return VNe(head, ne.spine + (frame,), None)
        return VNe(ne.head, ne.spine + (frame,), Lazy(lambda: self.elim(g.force(), frame)))

    def force(self, v: Value) -> Value:
        """Weak-head normal form: unfold glued heads and solved metas."""
        while type(v) is VNe:
            if v.glued is not None:
                v = v.glued.force()
                continue
            head = v.head
            if type(head) is HMeta and self.metas is not None:
                if self.metas[head.id].solution is not None:
                    w = self.meta_value(head.id)
                    for fr in v.spine:
                        w = self.elim(w, fr)
                    v = w
                    continue
            break
        return v

    # read-back

    def quote(self, v: Value, lvl: int, unfold: bool = False) -> Term:
        """Read a value back to a term at binder depth ``lvl``.

        With ``unfold`` every global definition is unfolded, producing the
        beta/iota/eta-short normal form; otherwise global heads are kept.
        """
        if unfold:
            v = self.force(v)
        else:
            v = self._resolve_metas(v)
        tv = type(v)
        q = self.quote
        if tv is VNe:
            return self._quote_ne(v, lvl, unfold)
        if tv is VLam:
            return S.Lambda(v.name, q(v.body.apply(vvar(lvl)), lvl + 1, unfold), None, v.implicit)
        if tv is VPi:
            return S.Pi(v.name, q(v.dom, lvl, unfold), q(v.cod.apply(vvar(lvl)), lvl + 1, unfold), v.implicit)
        if tv is VSigma:
            return S.Sigma(v.name, q(v.fst, lvl, unfold), q(v.snd.apply(vvar(lvl)), lvl + 1, unfold))
        if tv is VPair:
            return S.Pair(q(v.fst, lvl, unfold), q(v.snd, lvl, unfold))
        if tv is VU:
            return S.Universe(v.level)
        if tv is VId:
            return S.Id(q(v.type, lvl, unfold), q(v.lhs, lvl, unfold), q(v.rhs, lvl, unfold))
        if tv is VRefl:
            return S.Refl(q(v.type, lvl, unfold), q(v.point, lvl, unfold))
        if tv is VSucc:
            n = 1
            v = v.pred
            while True:
                v = self.force(v) if unfold else self._resolve_metas(v)
                if type(v) is not VSucc:
                    break
                n += 1
                v = v.pred
            t = q(v, lvl, unfold)
            for _ in range(n):
                t = S.Succ(t)
            return t
        if tv is _Const:
            return _CONST_QUOTE[v]
        raise KernelBug(f"cannot quote {v!r}")

    def _resolve_metas(self, v):
        while type(v) is VNe and v.glued is None and type(v.head) is HMeta and self.metas is not None \
                and self.metas[v.head.id].solution is not None:
            v = self.force(v)
        return v

    def _quote_head(self, head, lvl) -> Term:
        th = type(head)
        if th is HVar:
            if head.level >= lvl:
                raise ScopeError(head.level)
            return S.Var(lvl - 1 - head.level)
        if th is HGlobal:
            return S.Global(head.name)
        return S.Meta(head.id)

    def _quote_ne(self, v: VNe, lvl, unfold) -> Term:
        t = self._quote_head(v.head, lvl)
        q = self.quote
        for fr in v.spine:
            ft = type(fr)
            if ft is FApp:
                t = S.App(t, q(fr.arg, lvl, unfold))
            elif ft is FFst:
                t = S.Fst(t)
            elif ft is FSnd:
                t = S.Snd(t)
            elif ft is FJ:
                t = S.J(q(fr.motive, lvl, unfold), q(fr.base, lvl, unfold),
                        q(fr.lhs, lvl, unfold), q(fr.rhs, lvl, unfold), t)
            elif ft is FNatRec:
                t = S.NatRec(q(fr.motive, lvl, unfold), q(fr.zero, lvl, unfold), q(fr.succ, lvl, unfold), t)
            elif ft is FBoolRec:
                t = S.BoolRec(q(fr.motive, lvl, unfold), q(fr.true, lvl, unfold), q(fr.false, lvl, unfold), t)
            elif ft is FUnitRec:
                t = S.UnitRec(q(fr.motive, lvl, unfold), q(fr.star, lvl, unfold), t)
            elif ft is FEmptyRec:
                t = S.EmptyRec(q(fr.motive, lvl, unfold), t)
            else:  # pragma: no cover
                raise KernelBug(f"unknown frame {fr!r}")
        return t

    def normalize(self, t: Term, lvl: int = 0, env: tuple = ()) -> Term:
        return self.quote(self.eval(env, t), lvl, unfold=True)


class ScopeError(Exception):
    """A value mentions a variable that is not in scope at the read-back depth."""


# --- conversion -------------------------------------------------------------------


class Conversion:
    """Definitional equality on values, with eta for functions and pairs.

    Subclasses may override :meth:`flex` to solve metavariables; the kernel's
    version never does.
    """

    def __init__(self, ev: Evaluator):
        self.ev = ev

    def flex(self, a, b, lvl) -> Optional[bool]:
        """Hook for metavariable heads; ``None`` means 'not handled'."""
        return None

    def conv_levels(self, i: int, j: int) -> bool:
        return i == j

    def mark(self):
        """Snapshot of any side effects, for :meth:`undo` (none in the kernel)."""
        return None

    def undo(self, mark) -> None:
        pass

    def conv(self, a: Value, b: Value, lvl: int) -> bool:
        if a is b:
            return True
        ev = self.ev
        ta, tb = type(a), type(b)
        if ta is VNe and tb is VNe and a.glued is not None and b.glued is not None \
                and a.head == b.head and len(a.spine) == len(b.spine):
            m = self.mark()
            if self.conv_spines(a.spine, b.spine, lvl):
                return True
            self.undo(m)
        a = ev.force(a)
        b = ev.force(b)
        if a is b:
            return True
        ta, tb = type(a), type(b)
        if ta is VNe or tb is VNe:
            r = self.flex(a, b, lvl)
            if r is not None:
                return r
        if ta is VLam:
            x = vvar(lvl)
            return self.conv(a.body.apply(x), ev.apply(b, x), lvl + 1)
        if tb is VLam:
            x = vvar(lvl)
            return self.conv(ev.apply(a, x), b.body.apply(x), lvl + 1)
        if ta is VPair:
            return self.conv(a.fst, ev.fst(b), lvl) and self.conv(a.snd, ev.snd(b), lvl)
        if tb is VPair:
            return self.conv(ev.fst(a), b.fst, lvl) and self.conv(ev.snd(a), b.snd, lvl)
        if ta is not tb:
            return False
        if ta is VNe:
            return a.head == b.head and len(a.spine) == len(b.spine) \
                and self.conv_spines(a.spine, b.spine, lvl)
        if ta is VPi:
            x = vvar(lvl)
            return self.conv(a.dom, b.dom, lvl) and self.conv(a.cod.apply(x), b.cod.apply(x), lvl + 1)
        if ta is VSigma:
            x = vvar(lvl)
            return self.conv(a.fst, b.fst, lvl) and self.conv(a.snd.apply(x), b.snd.apply(x), lvl + 1)
        if ta is VU:
            return self.conv_levels(a.level, b.level)
        if ta is VId:
            return self.conv(a.type, b.type, lvl) and self.conv(a.lhs, b.lhs, lvl) \
                and self.conv(a.rhs, b.rhs, lvl)
        if ta is VRefl:
            return self.conv(a.type, b.type, lvl) and self.conv(a.point, b.point, lvl)
        if ta is VSucc:
            return self.conv(a.pred, b.pred, lvl)
        if ta is _Const:
            return a is b
        raise KernelBug(f"cannot compare {a!r} and {b!r}")

    def conv_spines(self, sa: tuple, sb: tuple, lvl: int) -> bool:
        c = self.conv
        for fa, fb in zip(sa, sb):
            ft = type(fa)
            if ft is not type(fb):
                return False
            if ft is FApp:
                ok = c(fa.arg, fb.arg, lvl)
            elif ft is FFst or ft is FSnd:
                ok = True
            elif ft is FJ:
                ok = c(fa.motive, fb.motive, lvl) and c(fa.base, fb.base, lvl) \
                    and c(fa.lhs, fb.lhs, lvl) and c(fa.rhs, fb.rhs, lvl)
            elif ft is FNatRec:
                ok = c(fa.motive, fb.motive, lvl) and c(fa.zero, fb.zero, lvl) and c(fa.succ, fb.succ, lvl)
            elif ft is FBoolRec:
                ok = c(fa.motive, fb.motive, lvl) and c(fa.true, fb.true, lvl) and c(fa.false, fb.false, lvl)
            elif ft is FUnitRec:
                ok = c(fa.motive, fb.motive, lvl) and c(fa.star, fb.star, lvl)
            elif ft is FEmptyRec:
                ok = c(fa.motive, fb.motive, lvl)
            else:  # pragma: no cover
                raise KernelBug(f"unknown frame {fa!r}")
            if not ok:
                return False
        return True

    def subtype(self, a: Value, b: Value, lvl: int) -> bool:
        """Conversion up to universe cumulativity (covariant in Pi codomains)."""
        ev = self.ev
        fa, fb = ev.force(a), ev.force(b)
        if type(fa) is VU and type(fb) is VU:
            return fa.level <= fb.level or self.conv_levels(fa.level, fb.level)
        if type(fa) is VPi and type(fb) is VPi:
            x = vvar(lvl)
            return self.conv(fa.dom, fb.dom, lvl) and \
                self.subtype(fa.cod.apply(x), fb.cod.apply(x), lvl + 1)
        return self.conv(a, b, lvl)


# --- contexts ----------------------------------------------------------------------


class Context:
    """Local typing context: parallel tuples of names, values and types."""

    __slots__ = ("names", "env", "types")

    def __init__(self, names=(), env=(), types=()):
        self.names = names
        self.env = env
        self.types = types

    @property
    def depth(self):
        return len(self.env)

    def bind(self, name: str, type: Value) -> "Context":
        return Context(self.names + (name,), self.env + (vvar(len(self.env)),), self.types + (type,))

    def define(self, name: str, type: Value, value: Value) -> "Context":
        return Context(self.names + (name,), self.env + (value,), self.types + (type,))

    def lookup(self, name: str):
        """Return ``(index, type)`` of the innermost binder named ``name``."""
        for i in range(len(self.names) - 1, -1, -1):
            if self.names[i] == name:
                return len(self.names) - 1 - i, self.types[i]
        return None


EMPTY_CTX = Context()


# --- type checking -------------------------------------------------------------------


class Checker:
    """Bidirectional checker for meta-free core terms."""

    def __init__(self, globals: GlobalEnv, max_level: int = DEFAULT_MAX_LEVEL, metas=None):
        self.globals = globals
        self.max_level = max_level
        self.ev = Evaluator(globals, metas)
        self.cv = Conversion(self.ev)

    # helpers

    def show(self, ctx: Context, v: Value) -> str:
        from .pretty import show_term

        try:
            return show_term(self.ev.quote(v, ctx.depth), ctx.names)
        except Exception:  # pragma: no cover - best effort rendering
            return repr(v)

    def show_term(self, ctx: Context, t: Term) -> str:
        from .pretty import show_term

        return show_term(t, ctx.names)

    def error(self, msg, code="E-TYPE"):
        return TypeCheckError(msg, code=code)

    def eval(self, ctx: Context, t: Term) -> Value:
        return self.ev.eval(ctx.env, t)

    def universe(self, level: int) -> VU:
        if level > self.max_level:
            raise self.error(f"universe level {level} exceeds the maximum {self.max_level}", "E-UNIVERSE")
        return VU(level)

    def top(self) -> VU:
        return VU(self.max_level)

    # judgements

    def infer_sort(self, ctx: Context, t: Term) -> int:
        ty = self.ev.force(self.infer(ctx, t))
        if type(ty) is not VU:
            raise self.error(f"expected a type, but `{self.show_term(ctx, t)}` has type {self.show(ctx, ty)}")
        return ty.level

    def check_mismatch(self, ctx, t, inferred, expected):
        fi, fe = self.ev.force(inferred), self.ev.force(expected)
        if type(fi) is VU and type(fe) is VU:
            raise self.error(
                f"universe inconsistency: `{self.show_term(ctx, t)}` lives in Type {fi.level}, "
                f"which does not fit in Type {fe.level}", "E-UNIVERSE")
        raise self.error(
            f"type mismatch for `{self.show_term(ctx, t)}`\n  expected: {self.show(ctx, expected)}\n"
            f"  actual:   {self.show(ctx, inferred)}")

    def check(self, ctx: Context, t: Term, expected: Value) -> None:
        tt = type(t)
        ev = self.ev
        if tt is S.Lambda:
            exp = ev.force(expected)
            if type(exp) is not VPi:
                raise self.error(f"a function was given where {self.show(ctx, expected)} was expected")
            if t.domain is not None:
                self.infer_sort(ctx, t.domain)
                if not self.cv.conv(self.eval(ctx, t.domain), exp.dom, ctx.depth):
                    raise self.error(
                        f"lambda annotation {self.show_term(ctx, t.domain)} does not match "
                        f"{self.show(ctx, exp.dom)}")
            x = vvar(ctx.depth)
            self.check(ctx.bind(t.name, exp.dom), t.body, exp.cod.apply(x))
            return
        if tt is S.Pair:
            exp = ev.force(expected)
            if type(exp) is not VSigma:
                raise self.error(f"a pair was given where {self.show(ctx, expected)} was expected")
            if t.ann is not None:
                self.infer_sort(ctx, t.ann)
                if not self.cv.conv(self.eval(ctx, t.ann), exp, ctx.depth):
                    raise self.error("pair annotation does not match the expected type")
            self.check(ctx, t.fst, exp.fst)
            self.check(ctx, t.snd, exp.snd.apply(self.eval(ctx, t.fst)))
            return
        inferred = self.infer(ctx, t)
        if not self.cv.subtype(inferred, expected, ctx.depth):
            self.check_mismatch(ctx, t, inferred, expected)

    def infer(self, ctx: Context, t: Term) -> Value:
        tt = type(t)
        ev = self.ev
        if tt is S.Var:
            if not 0 <= t.index < ctx.depth:
                raise self.error(f"unbound variable index {t.index}")
            return ctx.types[-1 - t.index]
        if tt is S.Global:
            entry = self.globals.get(t.name)
            if entry is None:
                raise self.error(f"unknown global `{t.name}`")
            return entry.type_value
        if tt is S.App:
            fty = ev.force(self.infer(ctx, t.fn))
            if type(fty) is not VPi:
                raise self.error(
                    f"`{self.show_term(ctx, t.fn)}` is applied to an argument but has type "
                    f"{self.show(ctx, fty)}", "E-NOTFN")
            self.check(ctx, t.arg, fty.dom)
            return fty.cod.apply(self.eval(ctx, t.arg))
        if tt is S.Universe:
            if t.level < 0:
                raise self.error("negative universe level", "E-UNIVERSE")
            self.universe(t.level)
            return self.universe(t.level + 1)
        if tt is S.Pi or tt is S.Sigma:
            dom, cod = (t.domain, t.codomain) if tt is S.Pi else (t.first, t.second)
            i = self.infer_sort(ctx, dom)
            j = self.infer_sort(ctx.bind(t.name, self.eval(ctx, dom)), cod)
            return VU(max(i, j))
        if tt is S.Lambda:
            if t.domain is None:
                raise self.error("cannot infer the type of an unannotated lambda")
            self.infer_sort(ctx, t.domain)
            dom = self.eval(ctx, t.domain)
            body_ty = self.infer(ctx.bind(t.name, dom), t.body)
            cod = ev.quote(body_ty, ctx.depth + 1)
            return VPi(t.name, dom, TermClosure(ev, ctx.env, cod), t.implicit)
        if tt is S.Pair:
            if t.ann is None:
                raise self.error("cannot infer the type of an unannotated pair")
            self.infer_sort(ctx, t.ann)
            ty = self.eval(ctx, t.ann)
            self.check(ctx, t, ty)
            return ty
        if tt is S.Fst or tt is S.Snd:
            pty = ev.force(self.infer(ctx, t.pair))
            if type(pty) is not VSigma:
                raise self.error(
                    f"projection from `{self.show_term(ctx, t.pair)}`, which has non-Sigma type "
                    f"{self.show(ctx, pty)}")
            if tt is S.Fst:
                return pty.fst
            return pty.snd.apply(ev.fst(self.eval(ctx, t.pair)))
        if tt is S.Id:
            i = self.infer_sort(ctx, t.type)
            a = self.eval(ctx, t.type)
            self.check(ctx, t.lhs, a)
            self.check(ctx, t.rhs, a)
            return VU(i)
        if tt is S.Refl:
            self.infer_sort(ctx, t.type)
            a = self.eval(ctx, t.type)
            self.check(ctx, t.point, a)
            x = self.eval(ctx, t.point)
            return VId(a, x, x)
        if tt is S.J:
            return self.infer_j(ctx, t)
        if tt in (S.Nat, S.Unit, S.Empty, S.Bool):
            return VU(0)
        if tt is S.Zero:
            return VNat
        if tt is S.Star:
            return VUnit
        if tt is S.TrueT or tt is S.FalseT:
            return VBool
        if tt is S.Succ:
            self.check(ctx, t.pred, VNat)
            return VNat
        if tt is S.NatRec:
            return self.infer_natrec(ctx, t)
        if tt is S.BoolRec:
            motive = self.check_motive(ctx, t.motive, VBool)
            self.check(ctx, t.true_case, ev.apply(motive, VTrue))
            self.check(ctx, t.false_case, ev.apply(motive, VFalse))
            self.check(ctx, t.scrutinee, VBool)
            return ev.apply(motive, self.eval(ctx, t.scrutinee))
        if tt is S.UnitRec:
            motive = self.check_motive(ctx, t.motive, VUnit)
            self.check(ctx, t.star_case, ev.apply(motive, VStar))
            self.check(ctx, t.scrutinee, VUnit)
            return ev.apply(motive, self.eval(ctx, t.scrutinee))
        if tt is S.EmptyRec:
            motive = self.check_motive(ctx, t.motive, VEmpty)
            self.check(ctx, t.scrutinee, VEmpty)
            return ev.apply(motive, self.eval(ctx, t.scrutinee))
        if tt is S.Meta:
            raise self.error(f"unsolved metavariable ?{t.id} reached the kernel")
        raise KernelBug(f"cannot infer {t!r}")

    def check_motive(self, ctx: Context, motive: Term, dom: Value) -> Value:
        self.check(ctx, motive, VPi("x", dom, ConstClosure(self.top())))
        return self.eval(ctx, motive)

    def infer_natrec(self, ctx: Context, t: S.NatRec) -> Value:
        ev = self.ev
        motive = self.check_motive(ctx, t.motive, VNat)
        self.check(ctx, t.zero_case, ev.apply(motive, VZero))
        step = VPi("n", VNat, FunClosure(
            lambda n: VPi("ih", ev.apply(motive, n), ConstClosure(ev.apply(motive, VSucc(n))))))
        self.check(ctx, t.succ_case, step)
        self.check(ctx, t.scrutinee, VNat)
        return ev.apply(motive, self.eval(ctx, t.scrutinee))

    def infer_j(self, ctx: Context, t: S.J) -> Value:
        ev = self.ev
        pty = ev.force(self.infer(ctx, t.path))
        if type(pty) is not VId:
            raise self.error(
                f"J eliminates `{self.show_term(ctx, t.path)}`, which is not a path: {self.show(ctx, pty)}")
        a = pty.type
        self.check(ctx, t.lhs, a)
        self.check(ctx, t.rhs, a)
        lhs, rhs = self.eval(ctx, t.lhs), self.eval(ctx, t.rhs)
        if not self.cv.conv(lhs, pty.lhs, ctx.depth) or not self.cv.conv(rhs, pty.rhs, ctx.depth):
            raise self.error(
                f"J endpoints {self.show(ctx, lhs)} and {self.show(ctx, rhs)} do not match the path type "
                f"{self.show(ctx, pty)}")
        top = self.top()
        motive_ty = VPi("x", a, FunClosure(lambda x: VPi("y", a, FunClosure(
            lambda y: VPi("p", VId(a, x, y), ConstClosure(top))))))
        self.check(ctx, t.motive, motive_ty)
        motive = self.eval(ctx, t.motive)
        base_ty = VPi("x", a, FunClosure(lambda x: ev.apply_many(motive, x, x, VRefl(a, x))))
        self.check(ctx, t.base, base_ty)
        return ev.apply_many(motive, lhs, rhs, self.eval(ctx, t.path))

    # declarations

    def check_decl(self, decl: Declaration) -> GlobalEntry:
        """Check ``decl`` against the current globals and return its entry."""
        if decl.name in self.globals:
            raise DuplicateError(f"duplicate declaration `{decl.name}`", decl.span, decl.name)
        try:
            self.infer_sort(EMPTY_CTX, decl.type)
            ty = self.ev.eval((), decl.type)
            value = None
            if decl.body is not None:
                self.check(EMPTY_CTX, decl.body, ty)
                body = decl.body
                ev = self.ev
                value = Lazy(lambda: ev.eval((), body))
        except TypeCheckError as e:
            e.decl = e.decl or decl.name
            e.span = e.span or decl.span
            raise
        return GlobalEntry(decl.name, decl.type, decl.body, ty, value, decl.span)


def check_decl(env: GlobalEnv, decl: Declaration, max_level: int = DEFAULT_MAX_LEVEL) -> GlobalEnv:
    """Kernel-check ``decl`` and return ``env`` extended with it."""
    entry = Checker(env, max_level).check_decl(decl)
    return env.extended(entry)


# --- convenience entry points ------------------------------------------------------


def eval_term(t: Term, env: tuple = (), globals: Optional[GlobalEnv] = None) -> Value:
    return Evaluator(globals or GlobalEnv()).eval(env, t)


def quote(v: Value, depth: int = 0, globals: Optional[GlobalEnv] = None, unfold: bool = True) -> Term:
    return Evaluator(globals or GlobalEnv()).quote(v, depth, unfold)


def convert(a: Value, b: Value, depth: int = 0, globals: Optional[GlobalEnv] = None) -> bool:
    return Conversion(Evaluator(globals or GlobalEnv())).conv(a, b, depth)


def normalize(t: Term, globals: Optional[GlobalEnv] = None) -> Term:
    return Evaluator(globals or GlobalEnv()).normalize(t)


def infer(env: GlobalEnv, ctx: Context, t: Term, max_level: int = DEFAULT_MAX_LEVEL) -> Value:
    return Checker(env, max_level).infer(ctx, t)


def check(env: GlobalEnv, ctx: Context, t: Term, expected: Value, max_level: int = DEFAULT_MAX_LEVEL) -> None:
    Checker(env, max_level).check(ctx, t, expected)
