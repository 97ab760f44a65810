"""Surface-to-core elaboration with implicit arguments.

Metavariables are closed: a hole created in a context of depth ``d`` becomes
``Meta(m)`` applied to all ``d`` bound variables.  Unification solves a meta
whose spine is a list of distinct bound variables by abstracting over them
(the pattern fragment; in practice metas are only ever applied to the
variables of their own creation context, so this is first-order unification
modulo that bookkeeping).  Everything the elaborator produces is re-checked by
the kernel, so universe levels are treated leniently here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import syntax as S
from . import surface as U
from .errors import ElabError, HolimError, TypeCheckError
from .kernel import (DEFAULT_MAX_LEVEL, EMPTY_CTX, Checker, ConstClosure, Context, Conversion,
                     Evaluator, FApp, FunClosure, GlobalEnv, HMeta, HVar, ScopeError, TermClosure, VBool,
                     VEmpty, VFalse, VId, VLam, VNat, VNe, VPi, VRefl, VSigma, VStar, VSucc, VTrue,
                     VU, VUnit, VZero, Value, vvar)
from .surface import PRIM_ARITY
from .syntax import Declaration, SourceSpan, Term


@dataclass
class MetaEntry:
    id: int
    ctx: Context
    type: Value
    span: Optional[SourceSpan]
    solution: Optional[Term] = None
    value: Optional[Value] = None
    pruned: Optional[tuple] = None  # (fresh meta, kept args) when solved by pruning


class MetaContext:
    def __init__(self):
        self.entries: list[MetaEntry] = []
        self.trail: list[int] = []

    def __getitem__(self, mid: int) -> MetaEntry:
        return self.entries[mid]

    def __len__(self):
        return len(self.entries)

    def new(self, ctx: Context, ty: Value, span=None) -> int:
        mid = len(self.entries)
        self.entries.append(MetaEntry(mid, ctx, ty, span))
        return mid

    def solve(self, mid: int, sol: Term) -> None:
        e = self.entries[mid]
        assert e.solution is None, f"meta ?{mid} solved twice"
        e.solution = sol
        e.value = None
        self.trail.append(mid)

    def unsolved(self) -> list[MetaEntry]:
        return [e for e in self.entries if e.solution is None]


class _Occurs(Exception):
    pass


class Unifier(Conversion):
    """Conversion that may assign metavariables."""

    def __init__(self, ev: Evaluator, metas: MetaContext):
        super().__init__(ev)
        self.metas = metas

    def conv_levels(self, i, j):
        return True

    def mark(self):
        return len(self.metas.trail)

    def undo(self, mark):
        trail = self.metas.trail
        while len(trail) > mark:
            e = self.metas[trail.pop()]
            e.solution = None
            e.value = None
            e.pruned = None

    def flex(self, a, b, lvl):
        a_flex = type(a) is VNe and type(a.head) is HMeta
        b_flex = type(b) is VNe and type(b.head) is HMeta
        if a_flex and b_flex and a.head == b.head:
            return None
        if a_flex and self.solve(a, b, lvl):
            return True
        if b_flex:
            return self.solve(b, a, lvl)
        return False if a_flex else None

    def solve(self, ne: VNe, rhs: Value, lvl: int) -> bool:
        apps = 0
        while apps < len(ne.spine) and type(ne.spine[apps]) is FApp:
            apps += 1
        extra = len(ne.spine) - apps
        if extra:
            # ``fst ?m = fst u`` and the like: match trailing eliminations first-order
            if type(rhs) is not VNe or len(rhs.spine) < extra:
                return False
            m = self.mark()
            if not self.conv_spines(ne.spine[apps:], rhs.spine[-extra:], lvl):
                self.undo(m)
                return False
            rhs = VNe(rhs.head, rhs.spine[:-extra])
            ne = VNe(ne.head, ne.spine[:apps])
            if type(rhs.head) is HMeta and rhs.head == ne.head:
                return self.conv_spines(ne.spine, rhs.spine, lvl) if len(ne.spine) == len(rhs.spine) else False
        ren = {}
        for i, fr in enumerate(ne.spine):
            x = self.ev.force(fr.arg)
            if type(x) is not VNe or type(x.head) is not HVar or x.spine or x.head.level in ren:
                return self.approximate(ne, rhs, i, lvl)
            ren[x.head.level] = i
        mid = ne.head.id
        body = None
        for unfold in (False, True):
            try:
                t = self.ev.quote(rhs, lvl, unfold)
                body = self.rename(t, lvl, ren, len(ren), mid)
                break
            except ScopeError:
                continue
        if body is None:
            return False
        for i in range(len(ren) - 1, -1, -1):
            body = S.Lambda(f"x{i}", body)
        self.metas.solve(mid, body)
        return True

    def approximate(self, ne: VNe, rhs: Value, i: int, lvl: int) -> bool:
        """Outside the pattern fragment, try ``?m xs es = f es`` by ``?m xs = f``."""
        extra = len(ne.spine) - i
        if type(rhs) is not VNe or len(rhs.spine) < extra:
            return False
        if any(type(fr) is not FApp for fr in rhs.spine[-extra:]):
            return False
        m = self.mark()
        if (self.conv_spines(ne.spine[i:], rhs.spine[-extra:], lvl)
                and self.solve(VNe(ne.head, ne.spine[:i]), VNe(rhs.head, rhs.spine[:-extra]), lvl)):
            return True
        self.undo(m)
        return False

    def rename(self, t: Term, lvl: int, ren: dict, dom: int, mid: int) -> Term:
        """Re-index a term read back at depth ``lvl`` into a meta's scope of size ``dom``."""

        def var(t, depth):
            if t.index < depth:
                return t
            k = ren.get(lvl - 1 - (t.index - depth))
            if k is None:
                raise ScopeError(lvl - 1 - (t.index - depth))
            return S.Var(depth + dom - 1 - k)

        def go(t, depth):
            tp = type(t)
            if tp is S.Var:
                return var(t, depth)
            if tp is S.App or tp is S.Meta:
                head, args = t, []
                while type(head) is S.App:
                    args.append(head.arg)
                    head = head.fn
                if type(head) is S.Meta:
                    if head.id == mid:
                        raise _Occurs(mid)
                    args.reverse()
                    return self.prune(head.id, args, lambda a: go(a, depth))
            if tp in S.ATOMS:
                return t
            return S.map_children(t, lambda c, extra: go(c, depth + extra))

        return go(t, 0)

    def prune(self, mid: int, args: list, go) -> Term:
        """Rename the spine of ``?mid``; if a suffix of its context variables
        falls out of scope, replace it by a fresh meta over the remaining prefix."""
        e = self.metas[mid]
        while e.solution is not None and e.pruned is not None:
            # already pruned earlier in this same term
            mid, keep = e.pruned
            args = args[:keep]
            e = self.metas[mid]
        out = []
        for a in args:
            try:
                out.append(go(a))
            except ScopeError:
                break
        if len(out) < len(args):
            keep = len(out)
            if len(args) != e.ctx.depth:
                raise ScopeError(mid)
            drop = e.ctx.depth - keep
            ty = self.ev.quote(e.type, e.ctx.depth)
            if any(type(x) is S.Var and x.index < drop for x in _free_vars(ty)):
                raise ScopeError(mid)
            prefix = Context(e.ctx.names[:keep], e.ctx.env[:keep], e.ctx.types[:keep])
            ty_val = self.ev.eval(prefix.env, S.shift(ty, 0, -drop))
            fresh = self.metas.new(prefix, ty_val, e.span)
            sol: Term = S.Meta(fresh)
            for k in range(keep):
                sol = S.App(sol, S.Var(e.ctx.depth - 1 - k))
            for i in range(e.ctx.depth - 1, -1, -1):
                sol = S.Lambda(f"x{i}", sol)
            self.metas.solve(mid, sol)
            e.pruned = (fresh, keep)
            mid = fresh
        t: Term = S.Meta(mid)
        for a in out:
            t = S.App(t, a)
        return t


def _free_vars(t: Term, depth: int = 0):
    """Yield free variables of ``t`` re-indexed relative to its outside."""
    if type(t) is S.Var:
        if t.index >= depth:
            yield S.Var(t.index - depth)
        return
    for c, extra in S.children(t):
        yield from _free_vars(c, depth + extra)


def zonk(t: Term, metas: MetaContext) -> Term:
    """Replace solved metas by their solutions, beta-reducing their spines."""

    cache: dict[int, Term] = {}

    def solution(e: MetaEntry) -> Term:
        if e.id not in cache:
            cache[e.id] = go(e.solution)
        return cache[e.id]

    def go(t):
        tp = type(t)
        if tp is S.App or tp is S.Meta:
            args = []
            head = t
            while type(head) is S.App:
                args.append(head.arg)
                head = head.fn
            if type(head) is S.Meta:
                e = metas[head.id]
                if e.solution is None:
                    raise unsolved_error(metas, e)
                sol = solution(e)
                args = [go(a) for a in reversed(args)]
                for a in args:
                    if type(sol) is S.Lambda:
                        sol = S.subst(sol.body, 0, a)
                    else:
                        sol = S.App(sol, a)
                return sol
        if tp in S.ATOMS:
            return t
        return S.map_children(t, lambda c, _: go(c))

    return go(t)


def unsolved_error(metas: MetaContext, e: MetaEntry) -> ElabError:
    from .pretty import show_term

    ev = Evaluator(GlobalEnv(), metas)
    try:
        ty = show_term(ev.quote(e.type, e.ctx.depth), e.ctx.names)
    except Exception:  # pragma: no cover
        ty = "?"
    return ElabError(f"could not infer implicit argument ?{e.id} : {ty}", e.span, code="E-UNSOLVED")


# --- elaboration ----------------------------------------------------------------------


class Elaborator:
    def __init__(self, globals: GlobalEnv, max_level: int = DEFAULT_MAX_LEVEL):
        self.globals = globals
        self.max_level = max_level
        self.metas = MetaContext()
        self.ev = Evaluator(globals, self.metas)
        self.un = Unifier(self.ev, self.metas)
        self._fresh = 0

    # utilities

    def show(self, ctx: Context, v: Value) -> str:
        from .pretty import show_term

        try:
            return show_term(self.ev.quote(v, ctx.depth), ctx.names)
        except Exception:  # pragma: no cover
            return repr(v)

    def eval(self, ctx: Context, t: Term) -> Value:
        return self.ev.eval(ctx.env, t)

    def quote(self, ctx: Context, v: Value) -> Term:
        return self.ev.quote(v, ctx.depth)

    def top(self) -> VU:
        return VU(self.max_level)

    def fresh_meta(self, ctx: Context, ty: Value, span=None) -> Term:
        mid = self.metas.new(ctx, ty, span)
        t: Term = S.Meta(mid)
        d = ctx.depth
        for k in range(d):
            t = S.App(t, S.Var(d - 1 - k))
        return t

    def fresh_name(self) -> str:
        self._fresh += 1
        return f"x%{self._fresh}"

    def unify(self, ctx: Context, actual: Value, expected: Value, what: str = "term"):
        try:
            ok = self.un.subtype(actual, expected, ctx.depth)
        except _Occurs as e:
            raise ElabError(f"cyclic solution for ?{e.args[0]} while checking {what}", code="E-OCCURS")
        if not ok:
            raise ElabError(
                f"type mismatch for {what}\n  expected: {self.show(ctx, expected)}\n"
                f"  actual:   {self.show(ctx, actual)}", code=self.mismatch_code(ctx, actual, expected))

    def mismatch_code(self, ctx: Context, *vals) -> str:
        # a mismatch that involves no metavariable is an ordinary type error
        try:
            flexible = any(S.has_meta(self.ev.quote(v, ctx.depth)) for v in vals)
        except Exception:  # pragma: no cover
            flexible = True
        return "E-UNIFY" if flexible else "E-TYPE"

    def unify_values(self, ctx: Context, a: Value, b: Value, what: str):
        try:
            ok = self.un.conv(a, b, ctx.depth)
        except _Occurs as e:
            raise ElabError(f"cyclic solution for ?{e.args[0]} while checking {what}", code="E-OCCURS")
        if not ok:
            raise ElabError(f"cannot unify {self.show(ctx, a)} with {self.show(ctx, b)} ({what})", code="E-UNIFY")

    def sort_level(self, ctx: Context, ty: Value, s) -> int:
        f = self.ev.force(ty)
        if type(f) is VU:
            return f.level
        if type(f) is VNe and type(f.head) is HMeta:
            self.unify_values(ctx, f, self.top(), "a type")
            return self.max_level
        raise ElabError(f"expected a type, found a term of type {self.show(ctx, ty)}", code="E-UNIFY")

    def elab_type(self, ctx: Context, s) -> tuple[Term, int]:
        t, ty = self.infer(ctx, s)
        return t, self.sort_level(ctx, ty, s)

    def _spanned(self, e: HolimError, s):
        if e.span is None:
            e.span = getattr(s, "span", None)
        return e

    # checking

    def check(self, ctx: Context, s, expected: Value) -> Term:
        try:
            return self._check(ctx, s, expected)
        except HolimError as e:
            raise self._spanned(e, s)

    def _check(self, ctx: Context, s, expected: Value) -> Term:
        exp = self.ev.force(expected)
        ts = type(s)
        if type(exp) is VPi and exp.implicit and ts is not U.SExplicit \
                and not (ts is U.SLam and s.binders[0].implicit):
            body = self.check(ctx.bind(exp.name, exp.dom), s, exp.cod.apply(vvar(ctx.depth)))
            return S.Lambda(exp.name, body, None, True)
        if ts is U.SLam:
            return self.check_lam(ctx, _flatten(s.binders), 0, s.body, exp)
        if ts is U.SPair and type(exp) is VSigma:
            ann = None
            if s.ann is not None:
                ann, _ = self.elab_type(ctx, s.ann)
                self.unify_values(ctx, self.eval(ctx, ann), exp, "pair annotation")
            a = self.check(ctx, s.fst, exp.fst)
            b = self.check(ctx, s.snd, exp.snd.apply(self.eval(ctx, a)))
            return S.Pair(a, b, ann)
        if ts is U.SHole:
            return self.fresh_meta(ctx, expected, s.span)
        if ts is U.SApp or ts is U.SKw:
            head, args = _spine(s)
            if type(head) is U.SKw and head.name in PRIM_ARITY and len(args) < PRIM_ARITY[head.name]:
                return self.check(ctx, self.eta_prim(head, args), expected)
        t, ty = self.infer(ctx, s)
        self.unify(ctx, ty, expected, f"`{U_print(s)}`")
        return t

    def check_lam(self, ctx: Context, binders: list, i: int, body, expected: Value) -> Term:
        if i == len(binders):
            return self.check(ctx, body, expected)
        name, ty_s, implicit = binders[i]
        exp = self.ev.force(expected)
        if type(exp) is VPi and exp.implicit and not implicit:
            inner = self.check_lam(ctx.bind(exp.name, exp.dom), binders, i, body,
                                   exp.cod.apply(vvar(ctx.depth)))
            return S.Lambda(exp.name, inner, None, True)
        if type(exp) is VNe and type(exp.head) is HMeta:
            exp = self.refine_to_pi(ctx, name, ty_s, implicit, exp)
        if type(exp) is not VPi:
            raise ElabError(f"a function was given where {self.show(ctx, exp)} was expected",
                            code="E-UNIFY")
        if implicit and not exp.implicit:
            raise ElabError(f"implicit binder {{{name}}} where an explicit argument was expected",
                            code="E-UNIFY")
        dom_t = None
        if ty_s is not None:
            dom_t, _ = self.elab_type(ctx, ty_s)
            self.unify_values(ctx, self.eval(ctx, dom_t), exp.dom, f"type of binder `{name}`")
        inner = self.check_lam(ctx.bind(name, exp.dom), binders, i + 1, body,
                               exp.cod.apply(vvar(ctx.depth)))
        return S.Lambda(name, inner, dom_t, implicit)

    def refine_to_pi(self, ctx: Context, name: str, ty_s, implicit: bool, exp: Value) -> Value:
        """Solve an unknown expected type by a Pi-type with fresh domain and codomain."""
        if ty_s is not None:
            dom, _ = self.elab_type(ctx, ty_s)
        else:
            dom = self.fresh_meta(ctx, self.top())
        dom_v = self.eval(ctx, dom)
        cod = self.fresh_meta(ctx.bind(name, dom_v), self.top())
        pi = VPi(name, dom_v, TermClosure(self.ev, ctx.env, cod), implicit)
        self.unify_values(ctx, pi, exp, "function type")
        return pi

    def eta_prim(self, head: U.SKw, args: list):
        names = [self.fresh_name() for _ in range(PRIM_ARITY[head.name] - len(args))]
        body = head
        for a in args + [U.SVar(n) for n in names]:
            body = U.SApp(body, a, head.span)
        return U.SLam(tuple(U.Group((n,)) for n in names), body, head.span)

    # inference

    def infer(self, ctx: Context, s) -> tuple[Term, Value]:
        try:
            return self._infer(ctx, s)
        except HolimError as e:
            raise self._spanned(e, s)

    def _infer(self, ctx: Context, s) -> tuple[Term, Value]:
        ts = type(s)
        if ts is U.SVar or ts is U.SExplicit or ts is U.SApp or ts is U.SKw:
            head, args = _spine(s)
            return self.infer_app(ctx, head, args)
        if ts is U.SType:
            return S.Universe(s.level), VU(s.level + 1)
        if ts is U.SNum:
            return S.nat_literal(s.value), VNat
        if ts is U.SHole:
            a = self.fresh_meta(ctx, self.top(), s.span)
            av = self.eval(ctx, a)
            return self.fresh_meta(ctx, av, s.span), av
        if ts is U.SPi:
            return self.infer_binders(ctx, _flatten(s.binders), s.codomain, "Pi")
        if ts is U.SSigma:
            return self.infer_binders(ctx, _flatten(s.binders), s.second, "Sigma")
        if ts is U.SArrow:
            return self.infer_binders(ctx, [("_", s.domain, False)], s.codomain, "Pi")
        if ts is U.SProd:
            return self.infer_binders(ctx, [("_", s.first, False)], s.second, "Sigma")
        if ts is U.SLam:
            return self.infer_lam(ctx, _flatten(s.binders), s.body)
        if ts is U.SPair:
            if s.ann is not None:
                ann, _ = self.elab_type(ctx, s.ann)
                ty = self.eval(ctx, ann)
                t = self.check(ctx, U.SPair(s.fst, s.snd, None, s.span), ty)
                return S.Pair(t.fst, t.snd, ann), ty
            a, aty = self.infer(ctx, s.fst)
            b, bty = self.infer(ctx, s.snd)
            ann = S.Sigma("_", self.quote(ctx, aty), S.shift(self.quote(ctx, bty), 0, 1))
            return S.Pair(a, b, ann), self.eval(ctx, ann)
        if ts is U.SAnn:
            ty_t, _ = self.elab_type(ctx, s.type)
            ty = self.eval(ctx, ty_t)
            t = self.check(ctx, s.term, ty)
            if type(t) is S.Lambda and t.domain is None or type(t) is S.Pair and t.ann is None:
                t = S.App(S.Lambda("x", S.Var(0), ty_t), t)
            return t, ty
        if ts is U.SMetaRef:
            raise ElabError("metavariable references cannot be elaborated", code="E-UNRESOLVED")
        raise TypeError(f"unknown surface node {s!r}")

    def infer_binders(self, ctx: Context, binders: list, body, kind: str):
        if not binders:
            t, lvl = self.elab_type(ctx, body)
            return t, VU(lvl)
        name, ty_s, implicit = binders[0]
        if ty_s is None:
            raise ElabError(f"binder `{name}` needs a type", code="E-UNIFY")
        dom, i = self.elab_type(ctx, ty_s)
        rest, rest_ty = self.infer_binders(ctx.bind(name, self.eval(ctx, dom)), binders[1:], body, kind)
        j = self.ev.force(rest_ty).level
        if kind == "Pi":
            return S.Pi(name, dom, rest, implicit), VU(max(i, j))
        return S.Sigma(name, dom, rest), VU(max(i, j))

    def infer_lam(self, ctx: Context, binders: list, body):
        if not binders:
            return self.infer(ctx, body)
        name, ty_s, implicit = binders[0]
        if ty_s is None:
            raise ElabError(f"cannot infer the type of binder `{name}`; add an annotation",
                            code="E-UNIFY")
        dom, _ = self.elab_type(ctx, ty_s)
        domv = self.eval(ctx, dom)
        inner = ctx.bind(name, domv)
        b, bty = self.infer_lam(inner, binders[1:], body)
        cod = self.ev.quote(bty, inner.depth)
        return S.Lambda(name, b, dom, implicit), VPi(name, domv, TermClosure(self.ev, ctx.env, cod), implicit)

    def insert_implicits(self, ctx: Context, t: Term, ty: Value, span):
        while True:
            f = self.ev.force(ty)
            if type(f) is not VPi or not f.implicit:
                return t, ty
            m = self.fresh_meta(ctx, f.dom, span)
            t = S.App(t, m)
            ty = f.cod.apply(self.eval(ctx, m))

    def resolve(self, ctx: Context, name: str, span):
        found = ctx.lookup(name)
        if found is not None:
            idx, ty = found
            return S.Var(idx), ty
        entry = self.globals.get(name)
        if entry is None:
            raise ElabError(f"unresolved name `{name}`", span, code="E-UNRESOLVED")
        return S.Global(name), entry.type_value

    def infer_app(self, ctx: Context, head, args: list):
        th = type(head)
        if th is U.SKw:
            return self.infer_kw(ctx, head, args)
        explicit = th is U.SExplicit
        if th is U.SVar or th is U.SExplicit:
            t, ty = self.resolve(ctx, head.name, head.span)
        else:
            t, ty = self.infer(ctx, head)
        for arg in args:
            if not explicit:
                t, ty = self.insert_implicits(ctx, t, ty, arg.span)
            f = self.ev.force(ty)
            if type(f) is not VPi:
                raise ElabError(
                    f"`{U_print(head)}` is applied to too many arguments (type {self.show(ctx, ty)})",
                    arg.span, code="E-NOTFN")
            a = self.check(ctx, arg, f.dom)
            t = S.App(t, a)
            ty = f.cod.apply(self.eval(ctx, a))
        if not explicit:
            t, ty = self.insert_implicits(ctx, t, ty, head.span)
        return t, ty

    def apply_rest(self, ctx, t, ty, args):
        for arg in args:
            f = self.ev.force(ty)
            if type(f) is not VPi:
                raise ElabError(f"too many arguments (type {self.show(ctx, ty)})", arg.span, code="E-NOTFN")
            a = self.check(ctx, arg, f.dom)
            t = S.App(t, a)
            ty = f.cod.apply(self.eval(ctx, a))
        return t, ty

    def infer_kw(self, ctx: Context, head: U.SKw, args: list):
        name = head.name
        ev = self.ev
        const = {"Nat": (S.NAT, VU(0)), "Unit": (S.UNIT, VU(0)), "Empty": (S.EMPTY, VU(0)),
                 "Bool": (S.BOOL, VU(0)), "zero": (S.ZERO, VNat), "star": (S.STAR, VUnit),
                 "true": (S.TRUE, VBool), "false": (S.FALSE, VBool)}
        if name in const:
            t, ty = const[name]
            return self.apply_rest(ctx, t, ty, args)
        arity = PRIM_ARITY[name]
        if len(args) < arity:
            raise ElabError(f"`{name}` needs {arity} arguments here; partial use requires an expected type",
                            head.span, code="E-UNIFY")
        a, rest = args[:arity], args[arity:]
        top = self.top()
        if name == "succ":
            t, ty = S.Succ(self.check(ctx, a[0], VNat)), VNat
        elif name in ("fst", "snd"):
            p, pty = self.infer(ctx, a[0])
            f = ev.force(pty)
            if type(f) is not VSigma:
                raise ElabError(f"`{name}` applied to a term of non-Sigma type {self.show(ctx, pty)}",
                                a[0].span, code="E-UNIFY")
            if name == "fst":
                t, ty = S.Fst(p), f.fst
            else:
                t, ty = S.Snd(p), f.snd.apply(ev.fst(self.eval(ctx, p)))
        elif name in ("Id", "refl"):
            pts = a[1:]
            if type(a[0]) is U.SHole:
                x, aty = self.infer(ctx, pts[0])
                A = self.quote(ctx, aty)
            else:
                A, _ = self.elab_type(ctx, a[0])
                aty = self.eval(ctx, A)
                x = self.check(ctx, pts[0], aty)
            lvl = self.sort_of_value(ctx, aty)
            if name == "Id":
                y = self.check(ctx, pts[1], aty)
                t, ty = S.Id(A, x, y), VU(lvl)
            else:
                xv = self.eval(ctx, x)
                t, ty = S.Refl(A, x), VId(aty, xv, xv)
        elif name == "J":
            t, ty = self.infer_j(ctx, a)
        elif name == "natrec":
            C = self.check_motive(ctx, a[0], VNat)
            z = self.check(ctx, a[1], ev.apply(C[1], VZero))
            step = VPi("n", VNat, FunClosure(
                lambda n: VPi("ih", ev.apply(C[1], n), ConstClosure(ev.apply(C[1], VSucc(n))))))
            sc = self.check(ctx, a[2], step)
            n = self.check(ctx, a[3], VNat)
            t, ty = S.NatRec(C[0], z, sc, n), ev.apply(C[1], self.eval(ctx, n))
        elif name == "boolrec":
            C = self.check_motive(ctx, a[0], VBool)
            x = self.check(ctx, a[1], ev.apply(C[1], VTrue))
            y = self.check(ctx, a[2], ev.apply(C[1], VFalse))
            b = self.check(ctx, a[3], VBool)
            t, ty = S.BoolRec(C[0], x, y, b), ev.apply(C[1], self.eval(ctx, b))
        elif name == "unitrec":
            C = self.check_motive(ctx, a[0], VUnit)
            x = self.check(ctx, a[1], ev.apply(C[1], VStar))
            u = self.check(ctx, a[2], VUnit)
            t, ty = S.UnitRec(C[0], x, u), ev.apply(C[1], self.eval(ctx, u))
        elif name == "emptyrec":
            C = self.check_motive(ctx, a[0], VEmpty)
            e = self.check(ctx, a[1], VEmpty)
            t, ty = S.EmptyRec(C[0], e), ev.apply(C[1], self.eval(ctx, e))
        else:  # pragma: no cover
            raise ElabError(f"unknown primitive {name}")
        return self.apply_rest(ctx, t, ty, rest)

    def sort_of_value(self, ctx: Context, ty: Value) -> int:
        """Best-effort universe level of a type value (exactness left to the kernel)."""
        f = self.ev.force(ty)
        tf = type(f)
        if tf is VU:
            return f.level + 1
        if f in (VNat, VUnit, VEmpty, VBool):
            return 0
        if tf is VId:
            return self.sort_of_value(ctx, f.type)
        if tf is VPi or tf is VSigma:
            a = f.dom if tf is VPi else f.fst
            b = (f.cod if tf is VPi else f.snd).apply(vvar(ctx.depth))
            inner = ctx.bind("_", a)
            return max(self.sort_of_value(ctx, a), self.sort_of_value(inner, b))
        if tf is VNe:
            head = f.head
            if type(head) is HVar:
                hty = ctx.types[head.level]
            elif type(head) is HMeta:
                return self.max_level
            else:
                hty = self.globals[head.name].type_value
            # a neutral type: its universe is the codomain of the head's type
            for fr in f.spine:
                h = self.ev.force(hty)
                if type(fr) is FApp and type(h) is VPi:
                    hty = h.cod.apply(fr.arg)
                else:
                    return self.max_level
            h = self.ev.force(hty)
            return h.level if type(h) is VU else self.max_level
        return self.max_level

    def check_motive(self, ctx: Context, s, dom: Value):
        t = self.check(ctx, s, VPi("x", dom, ConstClosure(self.top())))
        return t, self.eval(ctx, t)

    def infer_j(self, ctx: Context, a: list):
        ev = self.ev
        p, pty = self.infer(ctx, a[4])
        f = ev.force(pty)
        if type(f) is not VId:
            raise ElabError(f"J eliminates a term of non-identity type {self.show(ctx, pty)}",
                            a[4].span, code="E-UNIFY")
        A = f.type
        ends = []
        for s, v in ((a[2], f.lhs), (a[3], f.rhs)):
            if type(s) is U.SHole:
                ends.append(self.quote(ctx, v))
            else:
                e = self.check(ctx, s, A)
                self.unify_values(ctx, self.eval(ctx, e), v, "J endpoint")
                ends.append(e)
        top = self.top()
        motive_ty = VPi("x", A, FunClosure(lambda x: VPi("y", A, FunClosure(
            lambda y: VPi("p", VId(A, x, y), ConstClosure(top))))))
        C = self.check(ctx, a[0], motive_ty)
        Cv = self.eval(ctx, C)
        base_ty = VPi("x", A, FunClosure(lambda x: ev.apply_many(Cv, x, x, VRefl(A, x))))
        c = self.check(ctx, a[1], base_ty)
        lv, rv = self.eval(ctx, ends[0]), self.eval(ctx, ends[1])
        return S.J(C, c, ends[0], ends[1], p), ev.apply_many(Cv, lv, rv, self.eval(ctx, p))

    # declarations

    def elab_decl(self, d: U.SDecl) -> Declaration:
        ty_s = U.SPi(d.params, d.type, d.span) if d.params else d.type
        ty, _ = self.elab_type(EMPTY_CTX, ty_s)
        ty = zonk(ty, self.metas)
        body = None
        if d.body is not None:
            body_s = U.SLam(d.params, d.body, d.span) if d.params else d.body
            body = self.check(EMPTY_CTX, body_s, self.ev.eval((), ty))
            body = zonk(body, self.metas)
        return Declaration(d.name, ty, body, d.span)


def _flatten(groups) -> list:
    out = []
    for g in groups:
        for n in g.names:
            out.append((n, g.type, g.implicit))
    return out


def _spine(s):
    args = []
    while type(s) is U.SApp:
        args.append(s.arg)
        s = s.fn
    args.reverse()
    return s, args


def U_print(s) -> str:
    from .parser import print_term

    text = print_term(s)
    return text if len(text) <= 80 else text[:77] + "..."


def elaborate_decl(env: GlobalEnv, d: U.SDecl, max_level: int = DEFAULT_MAX_LEVEL) -> Declaration:
    """Elaborate one surface declaration to a meta-free core declaration."""
    try:
        return Elaborator(env, max_level).elab_decl(d)
    except HolimError as e:
        e.decl = e.decl or d.name
        e.span = e.span or d.span
        raise


def elaborate(env: GlobalEnv, ctx: Context, s, expected: Optional[Value] = None,
              max_level: int = DEFAULT_MAX_LEVEL) -> tuple[Term, Value]:
    """Elaborate a surface term; returns a meta-free term and its type."""
    el = Elaborator(env, max_level)
    if expected is None:
        t, ty = el.infer(ctx, s)
    else:
        t, ty = el.check(ctx, s, expected), expected
    t = zonk(t, el.metas)
    ty_t = zonk(el.ev.quote(ty, ctx.depth), el.metas)
    return t, Evaluator(env).eval(ctx.env, ty_t)


def check_surface_decl(env: GlobalEnv, d: U.SDecl, max_level: int = DEFAULT_MAX_LEVEL):
    """Elaborate then kernel-check; returns ``(core_decl, entry)``."""
    core = elaborate_decl(env, d, max_level)
    try:
        entry = Checker(env, max_level).check_decl(core)
    except TypeCheckError as e:
        e.decl = e.decl or d.name
        raise
    return core, entry
