import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holim import syntax as S

import gen


def test_well_scoped_examples():
    assert S.well_scoped(S.Var(0), 1)
    assert not S.well_scoped(S.Var(0), 0)
    assert S.well_scoped(S.Lambda("x", S.Var(1)), 1)
    assert not S.well_scoped(S.Lambda("x", S.Var(1)), 0)
    assert not S.well_scoped(S.Meta(0), 5)


def test_shift_examples():
    assert S.shift(S.Var(0), 0, 1) == S.Var(1)
    assert S.shift(S.Lambda("x", S.Var(0)), 0, 1) == S.Lambda("x", S.Var(0))
    assert S.shift(S.Lambda("x", S.Var(1)), 0, 2) == S.Lambda("x", S.Var(3))


def test_subst_examples():
    assert S.subst(S.Var(0), 0, S.Zero()) == S.Zero()
    assert S.subst(S.Succ(S.Var(0)), 0, S.Zero()) == S.Succ(S.Zero())
    t = S.Lambda("x", S.App(S.Var(1), S.Var(0)))
    assert S.subst(t, 0, S.Global("f")) == S.Lambda("x", S.App(S.Global("f"), S.Var(0)))


def test_subst_under_binder_shifts_replacement():
    # replacing Var 0 by Var 5 under a lambda must not capture the bound variable
    t = S.Lambda("x", S.App(S.Var(0), S.Var(1)))
    assert S.subst(t, 0, S.Var(5)) == S.Lambda("x", S.App(S.Var(0), S.Var(6)))


def test_binders_counted_per_field():
    # J's motive has no binders of its own; only Pi/Lambda/Sigma bodies do
    t = S.Pi("x", S.Var(0), S.Var(0))
    assert S.shift(t, 0, 1) == S.Pi("x", S.Var(1), S.Var(0))
    s = S.Sigma("x", S.Var(0), S.Var(1))
    assert S.shift(s, 0, 1) == S.Sigma("x", S.Var(1), S.Var(2))


def test_alpha_eq_ignores_names_and_implicitness():
    a = S.Lambda("x", S.Var(0), None, True)
    b = S.Lambda("y", S.Var(0))
    assert S.alpha_eq(a, b)
    assert not S.alpha_eq(a, S.Lambda("x", S.Zero()))


def test_helpers():
    t = S.App(S.Global("f"), S.Meta(3))
    assert S.has_meta(t)
    assert S.metas_of(t) == {3}
    assert S.globals_of(t) == {"f"}
    assert S.size(t) == 3
    assert S.nat_literal(2) == S.Succ(S.Succ(S.Zero()))


def test_declaration_axiom_has_no_body():
    d = S.Declaration("funext", S.Nat())
    assert d.body is None


def test_terms_are_hashable_and_immutable():
    t = S.Succ(S.Zero())
    assert hash(t) == hash(S.Succ(S.Zero()))
    with pytest.raises(Exception):
        t.pred = S.Zero()


# random well-scoped terms for the algebraic laws


def _random_term(rng, depth, scope):
    if depth == 0 or rng.random() < 0.2:
        choices = [S.Zero(), S.Nat(), S.Global("g")]
        if scope:
            choices += [S.Var(rng.randrange(scope))] * 3
        return rng.choice(choices)
    k = rng.randrange(6)
    d = depth - 1
    if k == 0:
        return S.Lambda("x", _random_term(rng, d, scope + 1))
    if k == 1:
        return S.App(_random_term(rng, d, scope), _random_term(rng, d, scope))
    if k == 2:
        return S.Pi("x", _random_term(rng, d, scope), _random_term(rng, d, scope + 1))
    if k == 3:
        return S.Sigma("x", _random_term(rng, d, scope), _random_term(rng, d, scope + 1))
    if k == 4:
        return S.Pair(_random_term(rng, d, scope), _random_term(rng, d, scope))
    return S.J(*(_random_term(rng, d, scope) for _ in range(5)))


terms = st.builds(lambda seed, scope: (_random_term(random.Random(seed), 5, scope), scope),
                  st.integers(0, 10**9), st.integers(0, 4))


@settings(max_examples=200, deadline=None)
@given(terms, st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
def test_shift_composes(ts, c, a, b):
    t, _ = ts
    assert S.shift(S.shift(t, c, a), c, b) == S.shift(t, c, a + b)


@settings(max_examples=200, deadline=None)
@given(terms, terms)
def test_subst_inverts_shift(ts, us):
    t, _ = ts
    u, _ = us
    assert S.subst(S.shift(t, 0, 1), 0, u) == t


@settings(max_examples=200, deadline=None)
@given(terms, st.integers(0, 10**9))
def test_subst_preserves_scoping(ts, seed):
    t, scope = ts
    depth = scope + 1
    u = _random_term(random.Random(seed), 3, scope)
    wide = S.shift(t, 0, 1)  # now well scoped at depth, with Var 0 free for substitution
    assert S.well_scoped(wide, depth)
    assert S.well_scoped(S.subst(wide, 0, u), scope)


def test_generated_terms_respect_depth():
    for s in gen.samples(200):
        assert gen.depth_of(s.term) <= 6
        assert S.well_scoped(s.term, len(s.ctx))
