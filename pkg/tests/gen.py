"""Random generator of well-typed core terms of bounded depth.

Types are drawn from a small closed language (``Nat``, ``Bool``, ``Unit``,
non-dependent function and pair types, and ``Id Nat k k``) so that they can be
moved under binders without shifting.  Terms mix introduction forms, redexes
and eliminations of context variables, which produces stuck neutrals.  Every
binder and pair is annotated, so each term also infers.

Depth is the height of the term tree, ignoring type annotations and motives
and counting a numeral (or ``refl`` at a numeral) as a single node.  The generator threads a depth budget
and never exceeds it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from holim import syntax as S

NAT, BOOL, UNIT = ("nat",), ("bool",), ("unit",)


def pi(a, b):
    return ("pi", a, b)


def sig(a, b):
    return ("sig", a, b)


def idn(k):
    return ("id", k)


def to_term(ty) -> S.Term:
    tag = ty[0]
    if tag == "nat":
        return S.Nat()
    if tag == "bool":
        return S.Bool()
    if tag == "unit":
        return S.Unit()
    if tag == "pi":
        return S.Pi("x", to_term(ty[1]), to_term(ty[2]))
    if tag == "sig":
        return S.Sigma("x", to_term(ty[1]), to_term(ty[2]))
    lit = S.nat_literal(ty[1])
    return S.Id(S.Nat(), lit, lit)


def min_depth(ty) -> int:
    """Smallest depth of a closed inhabitant built from introduction forms."""
    if ty[0] == "pi":
        return 1 + min_depth(ty[2])
    if ty[0] == "sig":
        return 1 + max(min_depth(ty[1]), min_depth(ty[2]))
    return 1


def _const_motive(ty, arity):
    m = to_term(ty)
    for _ in range(arity):
        m = S.Lambda("_", m)
    return m


def rand_type(rng: random.Random, depth: int = 2):
    r = rng.random()
    if depth <= 0 or r < 0.45:
        return rng.choice([NAT, NAT, BOOL, UNIT, idn(rng.randrange(3))])
    if r < 0.75:
        return pi(rand_type(rng, depth - 1), rand_type(rng, depth - 1))
    return sig(rand_type(rng, depth - 1), rand_type(rng, depth - 1))


def _is_numeral(t) -> bool:
    while type(t) is S.Succ:
        t = t.pred
    return type(t) is S.Zero


def depth_of(t: S.Term) -> int:
    if _is_numeral(t) or (type(t) is S.Refl and _is_numeral(t.point)):
        return 1
    skip = ("motive", "domain", "ann", "type")
    best = 0
    for name, _ in S._CHILDREN.get(type(t), ()):
        c = getattr(t, name)
        if c is not None and name not in skip:
            best = max(best, depth_of(c))
    return best + 1


@dataclass
class Sample:
    ctx: list  # types of free variables, outermost first
    type: tuple
    term: S.Term


class Generator:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def vars_where(self, ctx, pred):
        n = len(ctx)
        return [(S.Var(n - 1 - i), t) for i, t in enumerate(ctx) if pred(t)]

    def small_type(self, budget):
        for _ in range(20):
            a = rand_type(self.rng, 1)
            if min_depth(a) <= budget:
                return a
        return NAT

    def term(self, ctx, ty, budget):
        """A term of type ``ty`` whose depth is at most ``budget``."""
        assert budget >= min_depth(ty)
        need = min_depth(ty)
        options = [self.intro] * 3
        if self.vars_where(ctx, lambda t: t == ty):
            options += [self.var] * 2
        if budget - 1 >= need:
            options += [self.boolrec, self.unitrec]
        if budget - 2 >= need:
            options += [self.beta, self.proj_redex, self.j_refl]
        if budget - 3 >= need:
            options.append(self.natrec)
        if budget >= 2 and any(self._eliminable(ctx, ty, budget)):
            options += [self.elim_var] * 2
        return self.rng.choice(options)(ctx, ty, budget)

    def var(self, ctx, ty, budget):
        return self.rng.choice(self.vars_where(ctx, lambda t: t == ty))[0]

    def intro(self, ctx, ty, budget):
        rng = self.rng
        tag = ty[0]
        if tag == "nat":
            if budget >= 2 and rng.random() < 0.4:
                return S.Succ(self.term(ctx, NAT, budget - 1))
            return S.nat_literal(rng.randrange(3))
        if tag == "bool":
            return rng.choice([S.TrueT(), S.FalseT()])
        if tag == "unit":
            return S.Star()
        if tag == "pi":
            return S.Lambda("x", self.term(ctx + [ty[1]], ty[2], budget - 1), to_term(ty[1]))
        if tag == "sig":
            return S.Pair(self.term(ctx, ty[1], budget - 1), self.term(ctx, ty[2], budget - 1), to_term(ty))
        return S.Refl(S.Nat(), S.nat_literal(ty[1]))

    def beta(self, ctx, ty, budget):
        a = self.small_type(budget - 1)
        fn = S.Lambda("y", self.term(ctx + [a], ty, budget - 2), to_term(a))
        return S.App(fn, self.term(ctx, a, budget - 1))

    def proj_redex(self, ctx, ty, budget):
        other = self.small_type(budget - 2)
        a, b = self.term(ctx, ty, budget - 2), self.term(ctx, other, budget - 2)
        if self.rng.random() < 0.5:
            return S.Fst(S.Pair(a, b, to_term(sig(ty, other))))
        return S.Snd(S.Pair(b, a, to_term(sig(other, ty))))

    def boolrec(self, ctx, ty, budget):
        d = budget - 1
        return S.BoolRec(_const_motive(ty, 1), self.term(ctx, ty, d), self.term(ctx, ty, d),
                         self.term(ctx, BOOL, d))

    def natrec(self, ctx, ty, budget):
        d = budget - 1
        step = S.Lambda("n", S.Lambda("ih", self.term(ctx + [NAT, ty], ty, budget - 3), to_term(ty)), S.Nat())
        return S.NatRec(_const_motive(ty, 1), self.term(ctx, ty, d), step, self.term(ctx, NAT, d))

    def unitrec(self, ctx, ty, budget):
        d = budget - 1
        return S.UnitRec(_const_motive(ty, 1), self.term(ctx, ty, d), self.term(ctx, UNIT, d))

    def j_refl(self, ctx, ty, budget):
        ids = self.vars_where(ctx, lambda t: t[0] == "id")
        if ids and self.rng.random() < 0.5:
            path, pty = self.rng.choice(ids)
            k = pty[1]
        else:
            k = self.rng.randrange(3)
            path = S.Refl(S.Nat(), S.nat_literal(k))
        base = S.Lambda("z", self.term(ctx + [NAT], ty, budget - 2), S.Nat())
        lit = S.nat_literal(k)
        return S.J(_const_motive(ty, 3), base, lit, lit, path)

    def _eliminable(self, ctx, ty, budget):
        funs = self.vars_where(ctx, lambda t: t[0] == "pi" and t[2] == ty and min_depth(t[1]) <= budget - 1)
        pairs = self.vars_where(ctx, lambda t: t[0] == "sig" and ty in (t[1], t[2]))
        return funs, pairs

    def elim_var(self, ctx, ty, budget):
        """Eliminate a context variable whose type can produce ``ty``."""
        rng = self.rng
        funs, pairs = self._eliminable(ctx, ty, budget)
        if funs and (not pairs or rng.random() < 0.5):
            f, fty = rng.choice(funs)
            return S.App(f, self.term(ctx, fty[1], budget - 1))
        p, pty = rng.choice(pairs)
        if pty[1] == ty and (pty[2] != ty or rng.random() < 0.5):
            return S.Fst(p)
        return S.Snd(p)

    def sample(self, depth: int = 6, n_free: int = None) -> Sample:
        rng = self.rng
        if n_free is None:
            n_free = rng.randrange(4)
        ctx = [rand_type(rng, 2) for _ in range(n_free)]
        ty = rand_type(rng, 2)
        return Sample(ctx, ty, self.term(ctx, ty, depth))


def samples(count: int = 200, seed: int = 0, depth: int = 6) -> list:
    return [Generator(seed * 100003 + i).sample(depth) for i in range(count)]


def pair_neutrals(count: int = 20) -> list:
    """Stuck terms of pair type: a pair variable, or a function variable applied."""
    out = []
    seed = 0
    while len(out) < count:
        g = Generator(7919 * seed + 1)
        seed += 1
        pair_ty = sig(rand_type(g.rng, 1), rand_type(g.rng, 1))
        ctx = [pi(NAT, pair_ty), pair_ty]
        ne = S.Var(0) if seed % 2 else S.App(S.Var(1), g.term(ctx, NAT, 3))
        out.append(Sample(ctx, pair_ty, ne))
    return out
