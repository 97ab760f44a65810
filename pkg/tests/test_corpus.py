import os
import shutil
from pathlib import Path

import pytest

from holim import syntax as S
from holim.corpus import check_corpus, check_files, corpus_root, load_manifest, nf_of, type_of
from holim.elaborator import elaborate
from holim.errors import HolimError
from holim.kernel import EMPTY_CTX, Evaluator
from holim.parser import parse_term

from contract import AXIOMS, CONTRACT

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def test_manifest_matches_contract(manifest):
    assert {(e.name, e.file) for e in manifest.entries} == CONTRACT
    assert len(manifest.entries) == len(CONTRACT)


def test_manifest_has_one_axiom(manifest):
    assert {e.name for e in manifest.entries if e.kind == "axiom"} == AXIOMS
    assert {e.kind for e in manifest.entries} <= {"definition", "theorem", "axiom"}


def test_manifest_files_exist_in_import_order(manifest):
    for f in manifest.files:
        assert (manifest.root / f).exists()
    assert manifest.files[0] == "Prelude.hott"


def test_pristine_corpus_checks(corpus_report, manifest):
    assert corpus_report.ok, [d.render() for d in corpus_report.diagnostics]
    for e in manifest.entries:
        assert corpus_report.status(e.name) == "ok", e.name


def test_the_only_axiom_is_funext(corpus_env):
    assert [e.name for e in corpus_env.entries() if e.is_axiom] == ["funext_equiv"]


def test_totals_are_sum_of_files(corpus_report):
    totals = corpus_report.totals()
    per_file = corpus_report.per_file()
    for key in totals:
        assert totals[key] == sum(c[key] for c in per_file.values())
    assert set(corpus_report.file_times) == set(per_file)


def test_triangle_is_refl(corpus_report):
    body = corpus_report.core["two_pullback_triangle_commutes"].body
    while isinstance(body, S.Lambda):
        body = body.body
    assert isinstance(body, S.Refl)


def test_nf_examples(corpus_env):
    assert nf_of(corpus_env, "two_plus_two") == S.nat_literal(4)
    assert nf_of(corpus_env, "funext_equiv") == S.Global("funext_equiv")
    # transport along refl is the identity: fun A C a c => c
    assert S.alpha_eq(nf_of(corpus_env, "transport_refl_witness"),
                      S.Lambda("A", S.Lambda("C", S.Lambda("a", S.Lambda("c", S.Var(0))))))
    with pytest.raises(HolimError) as exc:
        nf_of(corpus_env, "nonexistent_lemma")
    assert exc.value.code == "E-MISSING"


def test_type_of(corpus_env):
    assert type_of(corpus_env, "two_plus_two") == S.Nat()


def test_happly_on_refl_is_pointwise_refl(corpus_env):
    ev = Evaluator(corpus_env)
    ctx = EMPTY_CTX.bind("f", ev.eval((), S.Pi("x", S.Nat(), S.Nat())))
    t, _ = elaborate(corpus_env, ctx, parse_term("happly (refl (Nat -> Nat) f)"))
    nf = ev.quote(ev.eval(ctx.env, t), 1, unfold=True)
    expected = S.Lambda("x", S.Refl(S.Nat(), S.App(S.Var(1), S.Var(0))))
    assert S.alpha_eq(nf, expected)


def test_fault_injection_two_of_six_f():
    report = check_files([CORPUS / "Fundamentals.hott"], overrides={"two_of_six_f": "star"})
    r = report.result("two_of_six_f")
    assert r.status == "failed"
    assert r.diagnostic.code == "E-TYPE"
    assert [x.name for x in report.results if x.status == "failed"] == ["two_of_six_f"]
    assert all(x.diagnostic.code == "E-SKIPPED" for x in report.results if x.status == "skipped")


def test_core_override_is_rejected_by_the_kernel():
    report = check_files([CORPUS / "Prelude.hott"], overrides={"two_plus_two": S.Star()})
    assert report.result("two_plus_two").status == "failed"
    assert report.result("two_plus_two").diagnostic.code == "E-TYPE"


def copy_corpus(tmp_path):
    root = tmp_path / "corpus"
    shutil.copytree(CORPUS, root)
    return root


def test_missing_manifest_entry(tmp_path):
    root = copy_corpus(tmp_path)
    with open(root / "MANIFEST.tsv", "a") as f:
        f.write("nonexistent_lemma\tPrelude.hott\ttheorem\n")
    report = check_corpus(load_manifest(root))
    assert not report.ok
    codes = {(d.decl, d.code) for d in report.diagnostics}
    assert ("nonexistent_lemma", "E-MISSING") in codes


def test_manifest_kind_must_match(tmp_path):
    root = copy_corpus(tmp_path)
    text = (root / "MANIFEST.tsv").read_text().replace("idmap\tPrelude.hott\tdefinition",
                                                       "idmap\tPrelude.hott\taxiom")
    (root / "MANIFEST.tsv").write_text(text)
    report = check_corpus(load_manifest(root))
    assert any(d.code == "E-MISSING" and d.decl == "idmap" for d in report.diagnostics)


def test_malformed_manifest(tmp_path):
    (tmp_path / "MANIFEST.tsv").write_text("idmap Prelude.hott\n")
    with pytest.raises(ValueError):
        load_manifest(tmp_path)


def test_corpus_root_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("HOLIM_CORPUS", str(tmp_path))
    assert corpus_root() == tmp_path
    monkeypatch.delenv("HOLIM_CORPUS")
    monkeypatch.chdir(tmp_path)
    assert corpus_root().resolve() == CORPUS.resolve()


def test_imports_are_followed():
    report = check_files([CORPUS / "Paths.hott"])
    files = {Path(p).name for p in report.file_times}
    assert files == {"Prelude.hott", "Paths.hott"}
    assert report.status("idmap") == "ok"


def test_parallel_parse_agrees(corpus_report, manifest):
    report = check_corpus(manifest, parallel_parse=True)
    assert [(r.name, r.status) for r in report.results] == [(r.name, r.status) for r in corpus_report.results]


def test_parse_error_is_reported(tmp_path):
    bad = tmp_path / "Bad.hott"
    bad.write_text("def x : Nat := (zero\n")
    report = check_files([bad])
    assert not report.ok
    assert report.diagnostics[0].code == "E-PARSE"


def test_missing_file_raises():
    with pytest.raises(OSError):
        check_files(["does_not_exist.hott"])


def test_duplicate_declaration(tmp_path):
    f = tmp_path / "Dup.hott"
    f.write_text("def a : Nat := zero\ndef a : Nat := zero\n")
    report = check_files([f])
    assert report.results[1].diagnostic.code == "E-DUPLICATE"


def test_universe_limit_is_respected(tmp_path):
    f = tmp_path / "U.hott"
    f.write_text("def big : Type 2 := Type 1\n")
    assert check_files([f]).ok
    assert not check_files([f], max_level=2).ok


def test_import_cycle(tmp_path):
    (tmp_path / "A.hott").write_text("import B\ndef a : Nat := zero\n")
    (tmp_path / "B.hott").write_text("import A\ndef b : Nat := zero\n")
    report = check_files([tmp_path / "A.hott"])
    assert not report.ok
    assert report.diagnostics[0].code == "E-IMPORT"
