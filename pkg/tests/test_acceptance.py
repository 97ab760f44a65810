"""Acceptance suite: one test per criterion, each printing a PASS or FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines are printed
even when output capture is on.
"""

import contextlib
import json
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from holim import syntax as S
from holim.corpus import check_files, nf_of
from holim.deep import run_deep
from holim.errors import HolimError
from holim.kernel import (EMPTY_CTX, Checker, Conversion, Evaluator, GlobalEnv, VPi, VU)
from holim.parser import parse_file, print_file

import gen
from contract import CONTRACT

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


@contextlib.contextmanager
def criterion(capsys, number, title):
    status = "FAIL"
    detail = ""
    try:
        yield
        status = "PASS"
    except BaseException as e:
        detail = f" ({type(e).__name__}: {str(e).splitlines()[0][:120] if str(e) else ''})"
        raise
    finally:
        with capsys.disabled():
            print(f"\n[{status}] criterion {number}: {title}{detail}")


def strip_lambdas(t):
    while isinstance(t, S.Lambda):
        t = t.body
    return t


def test_criterion_1_full_corpus(capsys, manifest, corpus_report):
    with criterion(capsys, 1, "corpus checks, every contract declaration present and ok, under 60 s"):
        t0 = time.perf_counter()
        proc = subprocess.run([sys.executable, "-m", "holim.cli", "corpus", "--json"], cwd=ROOT,
                              capture_output=True, text=True, timeout=600)
        elapsed = time.perf_counter() - t0
        assert proc.returncode == 0, proc.stderr[-2000:]
        data = json.loads(proc.stdout)
        assert data["declarations"]["failed"] == 0 and data["declarations"]["skipped"] == 0
        assert elapsed < 60, f"{elapsed:.1f} s"
        assert {(e.name, e.file) for e in manifest.entries} == CONTRACT
        for name, _ in CONTRACT:
            assert corpus_report.status(name) == "ok", name


def test_criterion_2_triangle_by_refl(capsys, corpus_report):
    with criterion(capsys, 2, "two_pullback_triangle_commutes is a single refl"):
        assert corpus_report.status("two_pullback_triangle_commutes") == "ok"
        body = corpus_report.core["two_pullback_triangle_commutes"].body
        assert isinstance(strip_lambdas(body), S.Refl)
        # the same body, handed straight to the kernel, still checks
        rechecked = check_files([CORPUS / "Pullbacks3.hott"],
                                overrides={"two_pullback_triangle_commutes": body})
        assert rechecked.status("two_pullback_triangle_commutes") == "ok"


def test_criterion_3_eta(capsys, corpus_env):
    with criterion(capsys, 3, "function eta for every corpus function, surjective pairing for 20 neutrals"):
        ev = Evaluator(corpus_env)
        cv = Conversion(ev)
        ch = Checker(corpus_env)

        def functions():
            n = 0
            for e in corpus_env.entries():
                ty = ev.force(ev.eval((), e.type_term))
                if type(ty) is not VPi:
                    continue
                eta = S.Lambda(ty.name, S.App(S.Global(e.name), S.Var(0)), None, ty.implicit)
                ch.check(EMPTY_CTX, eta, ty)
                g = ev.eval((), S.Global(e.name))
                v = ev.eval((), eta)
                assert cv.conv(v, g, 0) and cv.conv(g, v, 0), e.name
                n += 1
            return n

        assert run_deep(functions) > 200

        pairs = gen.pair_neutrals(20)
        assert len(pairs) == 20
        for s in pairs:
            ctx = EMPTY_CTX
            for ty in s.ctx:
                ctx = ctx.bind("v", ch.eval(ctx, gen.to_term(ty)))
            eta = S.Pair(S.Fst(s.term), S.Snd(s.term))
            ch.check(ctx, eta, ch.eval(ctx, gen.to_term(s.type)))
            a, b = ch.eval(ctx, s.term), ch.eval(ctx, eta)
            assert cv.conv(a, b, ctx.depth) and cv.conv(b, a, ctx.depth)


def test_criterion_4_kernel_properties(capsys, corpus_env):
    with criterion(capsys, 4, "conversion laws and quote/eval idempotence on 250 generated terms; "
                              "corpus normal forms re-check"):
        ch = Checker(GlobalEnv())
        ev, cv = ch.ev, ch.cv
        samples = gen.samples(250, seed=4)
        assert all(gen.depth_of(s.term) <= 6 for s in samples)
        for i, s in enumerate(samples):
            ctx = EMPTY_CTX
            for ty in s.ctx:
                ctx = ctx.bind("v", ch.eval(ctx, gen.to_term(ty)))
            d = ctx.depth
            ty_v = ch.eval(ctx, gen.to_term(s.type))
            ch.check(ctx, s.term, ty_v)
            a = ev.eval(ctx.env, s.term)
            nf = ev.quote(a, d, unfold=True)
            b = ev.eval(ctx.env, nf)
            c = ev.eval(ctx.env, S.App(S.Lambda("y", S.Var(0), gen.to_term(s.type)), s.term))
            other = ev.eval(ctx.env, gen.Generator(777 + i).term(s.ctx, s.type, 4))
            assert cv.conv(a, a, d)
            assert cv.conv(a, b, d) == cv.conv(b, a, d) is True
            assert cv.conv(a, other, d) == cv.conv(other, a, d)
            assert cv.conv(a, c, d) and cv.conv(c, b, d)  # a ~ c, c ~ b, and a ~ b above
            if cv.conv(other, a, d):
                assert cv.conv(other, b, d) and cv.conv(other, c, d)
            assert ev.quote(b, d, unfold=True) == nf
            ch.check(ctx, nf, ty_v)

        kernel = Checker(corpus_env)

        def corpus_bodies():
            n = 0
            for e in corpus_env.entries():
                if e.body_term is None:
                    continue
                nf = kernel.ev.quote(kernel.ev.eval((), e.body_term), 0)
                assert kernel.ev.quote(kernel.ev.eval((), nf), 0) == nf, e.name
                kernel.check(EMPTY_CTX, nf, kernel.ev.eval((), e.type_term))
                n += 1
            return n

        assert run_deep(corpus_bodies) == sum(1 for e in corpus_env.entries() if e.body_term is not None)


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_5_computation(capsys, corpus_env):
    with criterion(capsys, 5, "two_plus_two, J on refl and transport along refl compute, each under 1 s"):
        nf, dt = timed(lambda: nf_of(corpus_env, "two_plus_two"))
        assert nf == S.Succ(S.Succ(S.Succ(S.Succ(S.Zero())))) and dt < 1

        # J C c a a (refl a) reduces to c a
        ev = Evaluator(corpus_env)
        motive = S.Lambda("x", S.Lambda("y", S.Lambda("p", S.Pi("n", S.Nat(), S.Nat()))))
        base = S.Lambda("x", S.App(S.Global("plus"), S.Var(0)), S.Nat())
        a = S.nat_literal(2)
        j = S.App(S.J(motive, base, a, a, S.Refl(S.Nat(), a)), S.nat_literal(1))
        Checker(corpus_env).infer(EMPTY_CTX, j)
        got, dt = timed(lambda: ev.normalize(j))
        assert got == ev.normalize(S.App(S.App(base, a), S.nat_literal(1))) == S.nat_literal(3) and dt < 1

        got, dt = timed(lambda: nf_of(corpus_env, "transport_refl_witness"))
        identity = S.Lambda("A", S.Lambda("C", S.Lambda("a", S.Lambda("c", S.Var(0)))))
        assert S.alpha_eq(got, identity) and dt < 1


def test_criterion_6_fault_injection(capsys, manifest):
    with criterion(capsys, 6, "ill-typed stub in 10 random theorems fails at exactly that declaration"):
        theorems = sorted(e.name for e in manifest.entries if e.kind == "theorem")
        picked = random.Random(20240611).sample(theorems, 10)
        where = {e.name: e.file for e in manifest.entries}
        for name in picked:
            report = check_files([CORPUS / where[name]], overrides={name: S.Star()})
            r = report.result(name)
            assert r is not None and r.status == "failed", name
            assert r.diagnostic.code == "E-TYPE", (name, r.diagnostic.render())
            assert [x.name for x in report.results if x.status == "failed"] == [name]
            before = report.results[:report.results.index(r)]
            assert all(x.status == "ok" for x in before)
        # the named example from the contract
        report = check_files([CORPUS / "Fundamentals.hott"], overrides={"two_of_six_f": "star"})
        assert report.result("two_of_six_f").status == "failed"
        assert report.result("two_of_six_f").diagnostic.code == "E-TYPE"


def test_criterion_7_round_trip(capsys, manifest):
    with criterion(capsys, 7, "parse/print/parse is stable for every corpus file"):
        for name in manifest.files:
            path = CORPUS / name
            first = parse_file(path.read_text(), str(path))
            text = print_file(first)
            second = parse_file(text, "<printed>")
            assert second.decls == first.decls and second.imports == first.imports, name
            assert print_file(second) == text, name
            assert print_file(parse_file(path.read_text(), str(path))) == text, name


def test_criterion_8_no_type_in_type(capsys, tmp_path):
    with criterion(capsys, 8, "Type i : Type i is rejected with E-UNIVERSE for i in 0..3"):
        for i in range(4):
            with pytest.raises(HolimError) as exc:
                Checker(GlobalEnv()).check(EMPTY_CTX, S.Universe(i), VU(i))
            assert exc.value.code == "E-UNIVERSE", i
            f = tmp_path / f"U{i}.hott"
            f.write_text(f"def bad : Type {i} := Type {i}\n")
            report = check_files([f])
            assert report.result("bad").status == "failed"
            assert report.result("bad").diagnostic.code == "E-UNIVERSE", i
