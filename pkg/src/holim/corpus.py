"""Loading and checking ``.hott`` files and the corpus manifest."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from . import syntax as S
from . import surface as U
from .deep import run_deep
from .elaborator import Elaborator, elaborate_decl, zonk
from .errors import Diagnostic, HolimError, MissingError
from .kernel import DEFAULT_MAX_LEVEL, EMPTY_CTX, Checker, Evaluator, GlobalEnv
from .parser import parse_file, parse_term
from .syntax import Declaration, Term

KINDS = ("definition", "theorem", "axiom")


def corpus_root() -> Path:
    env = os.environ.get("HOLIM_CORPUS")
    if env:
        return Path(env)
    local = Path("corpus")
    if (local / "MANIFEST.tsv").exists():
        return local
    return Path(__file__).resolve().parents[2] / "corpus"


@dataclass(frozen=True)
class LemmaSpec:
    name: str
    file: str
    kind: str
    anchor: str = ""


@dataclass
class CorpusManifest:
    root: Path
    entries: list[LemmaSpec]
    files: list[str]

    def names(self) -> list[str]:
        return [e.name for e in self.entries]


def load_manifest(root: Optional[Union[str, Path]] = None) -> CorpusManifest:
    root = Path(root) if root is not None else corpus_root()
    path = root / "MANIFEST.tsv"
    entries, files = [], []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) < 3 or cols[2] not in KINDS:
            raise ValueError(f"{path}:{lineno}: malformed manifest line {raw!r}")
        spec = LemmaSpec(cols[0], cols[1], cols[2], cols[3] if len(cols) > 3 else "")
        entries.append(spec)
        if spec.file not in files:
            files.append(spec.file)
    return CorpusManifest(root, entries, files)


# --- results --------------------------------------------------------------------


@dataclass
class DeclResult:
    name: str
    file: str
    status: str  # ok | failed | skipped
    diagnostic: Optional[Diagnostic] = None
    seconds: float = 0.0


@dataclass
class CheckReport:
    results: list[DeclResult] = field(default_factory=list)
    file_times: dict = field(default_factory=dict)
    env: GlobalEnv = field(default_factory=GlobalEnv)
    core: dict = field(default_factory=dict)
    errors: list[Diagnostic] = field(default_factory=list)  # not tied to a declaration
    elapsed: float = 0.0

    def status(self, name: str) -> Optional[str]:
        for r in self.results:
            if r.name == name:
                return r.status
        return None

    def result(self, name: str) -> Optional[DeclResult]:
        for r in self.results:
            if r.name == name:
                return r
        return None

    @property
    def failures(self) -> list[DeclResult]:
        return [r for r in self.results if r.status != "ok"]

    @property
    def diagnostics(self) -> list[Diagnostic]:
        out = list(self.errors)
        out += [r.diagnostic for r in self.results if r.diagnostic is not None]
        return out

    @property
    def ok(self) -> bool:
        return not self.errors and all(r.status == "ok" for r in self.results)

    def totals(self) -> dict:
        counts = {"ok": 0, "failed": 0, "skipped": 0}
        for r in self.results:
            counts[r.status] += 1
        return counts

    def per_file(self) -> dict:
        out: dict[str, dict] = {}
        for r in self.results:
            c = out.setdefault(r.file, {"ok": 0, "failed": 0, "skipped": 0})
            c[r.status] += 1
        return out


# --- loading --------------------------------------------------------------------


def _module_path(base: Path, module: str) -> Path:
    return base / f"{module}.hott"


def load_sources(paths: list, parallel: bool = False) -> list:
    """Parse ``paths`` and everything they import; return ``[(path, SurfaceFile)]``
    in dependency order.  Parse errors propagate."""
    parsed: dict[Path, U.SurfaceFile] = {}

    def parse_one(p: Path):
        return parse_file(p.read_text(encoding="utf-8"), str(p))

    if parallel and len(paths) > 1:
        with ThreadPoolExecutor() as pool:
            for p, f in zip(paths, pool.map(parse_one, [Path(p) for p in paths])):
                parsed[Path(p)] = f

    order: list[Path] = []
    state: dict[Path, str] = {}

    def visit(p: Path, via=None):
        st = state.get(p)
        if st == "done":
            return
        if st == "active":
            raise HolimError(f"import cycle through {p.name}", code="E-IMPORT")
        state[p] = "active"
        if p not in parsed:
            if not p.exists():
                raise FileNotFoundError(f"{p}: no such file" + (f" (imported from {via})" if via else ""))
            parsed[p] = parse_one(p)
        for imp in parsed[p].imports:
            visit(_module_path(p.parent, imp.module), p)
        state[p] = "done"
        order.append(p)

    for p in paths:
        visit(Path(p))
    return [(p, parsed[p]) for p in order]


def _surface_refs(d: U.SDecl) -> set[str]:
    refs: set[str] = set()
    stack = [d.type, d.body] + [g.type for g in d.params]
    while stack:
        s = stack.pop()
        if s is None:
            continue
        ts = type(s)
        if ts is U.SVar or ts is U.SExplicit:
            refs.add(s.name)
        elif ts is U.SApp:
            stack += [s.fn, s.arg]
        elif ts in (U.SLam, U.SPi, U.SSigma):
            stack += [g.type for g in s.binders]
            stack.append(s.body if ts is U.SLam else s.codomain if ts is U.SPi else s.second)
        elif ts in (U.SArrow,):
            stack += [s.domain, s.codomain]
        elif ts is U.SProd:
            stack += [s.first, s.second]
        elif ts is U.SPair:
            stack += [s.fst, s.snd, s.ann]
        elif ts is U.SAnn:
            stack += [s.term, s.type]
    return refs


Override = Union[str, U.STerm, Term]


def _elaborate_with_override(env: GlobalEnv, d: U.SDecl, override: Override, max_level: int) -> Declaration:
    if isinstance(override, str):
        override = parse_term(override, "<override>")
    if isinstance(override, tuple(U.STerm.__args__)):
        return elaborate_decl(env, U.SDecl(d.kind, d.name, d.params, d.type, override, d.span), max_level)
    # a core term: elaborate only the stated type, hand the body to the kernel as is
    el = Elaborator(env, max_level)
    ty_s = U.SPi(d.params, d.type, d.span) if d.params else d.type
    ty, _ = el.elab_type(EMPTY_CTX, ty_s)
    return Declaration(d.name, zonk(ty, el.metas), override, d.span)


def check_sources(sources: list, env: Optional[GlobalEnv] = None, max_level: int = DEFAULT_MAX_LEVEL,
                  overrides: Optional[dict] = None, report: Optional[CheckReport] = None) -> CheckReport:
    """Elaborate and kernel-check parsed files in order, continuing past failures."""
    report = report or CheckReport()
    env = env.copy() if env is not None else GlobalEnv()
    overrides = overrides or {}
    bad: set[str] = set()
    start = time.perf_counter()
    for path, f in sources:
        t_file = time.perf_counter()
        for d in f.decls:
            t0 = time.perf_counter()
            blocked = sorted(_surface_refs(d) & bad)
            if blocked:
                diag = Diagnostic("E-SKIPPED", f"depends on failed declaration `{blocked[0]}`", d.span, d.name,
                                  severity="note")
                report.results.append(DeclResult(d.name, str(path), "skipped", diag))
                bad.add(d.name)
                continue
            try:
                if d.name in env:
                    raise HolimError(f"duplicate declaration `{d.name}`", d.span, d.name, code="E-DUPLICATE")
                if d.name in overrides:
                    core = _elaborate_with_override(env, d, overrides[d.name], max_level)
                else:
                    core = elaborate_decl(env, d, max_level)
                entry = Checker(env, max_level).check_decl(core)
                env.add(entry)
                report.core[d.name] = core
                report.results.append(DeclResult(d.name, str(path), "ok", None, time.perf_counter() - t0))
            except HolimError as e:
                e.decl = e.decl or d.name
                e.span = e.span or d.span
                report.results.append(DeclResult(d.name, str(path), "failed", e.diagnostic,
                                                 time.perf_counter() - t0))
                bad.add(d.name)
        report.file_times[str(path)] = time.perf_counter() - t_file
    report.env = env
    report.elapsed += time.perf_counter() - start
    return report


def check_files(paths: list, max_level: int = DEFAULT_MAX_LEVEL, overrides: Optional[dict] = None,
                parallel_parse: bool = False) -> CheckReport:
    """Check files (and their imports).  IO errors propagate; parse errors are reported."""

    def run():
        report = CheckReport()
        t0 = time.perf_counter()
        try:
            sources = load_sources(paths, parallel_parse)
        except HolimError as e:
            report.errors.append(e.diagnostic)
            report.elapsed = time.perf_counter() - t0
            return report
        report.elapsed = time.perf_counter() - t0
        return check_sources(sources, None, max_level, overrides, report)

    return run_deep(run)


def check_corpus(manifest: Optional[CorpusManifest] = None, env: Optional[GlobalEnv] = None,
                 max_level: int = DEFAULT_MAX_LEVEL, overrides: Optional[dict] = None,
                 parallel_parse: bool = False) -> CheckReport:
    """Check every manifest file in order and validate manifest coverage."""
    manifest = manifest or load_manifest()

    def run():
        report = CheckReport()
        t0 = time.perf_counter()
        paths = [manifest.root / f for f in manifest.files]
        try:
            sources = load_sources(paths, parallel_parse)
        except HolimError as e:
            report.errors.append(e.diagnostic)
            return report
        report.elapsed = time.perf_counter() - t0
        check_sources(sources, env, max_level, overrides, report)
        declared = {}
        for path, f in sources:
            for d in f.decls:
                declared.setdefault(d.name, (path, d))
        for spec in manifest.entries:
            where = manifest.root / spec.file
            if spec.name not in declared:
                err = MissingError(f"manifest entry `{spec.name}` has no declaration in {spec.file}",
                                   decl=spec.name)
                report.errors.append(err.diagnostic)
                continue
            path, d = declared[spec.name]
            if Path(path) != where:
                err = MissingError(f"`{spec.name}` is declared in {Path(path).name}, not {spec.file}",
                                   d.span, spec.name)
                report.errors.append(err.diagnostic)
            elif (spec.kind == "axiom") != (d.body is None):
                err = MissingError(f"`{spec.name}` is listed as {spec.kind} but declared as "
                                   f"{'an axiom' if d.body is None else 'a definition'}", d.span, spec.name)
                report.errors.append(err.diagnostic)
        return report

    return run_deep(run)


# --- queries --------------------------------------------------------------------


def _entry(env: GlobalEnv, name: str):
    entry = env.get(name)
    if entry is None:
        raise MissingError(f"no checked declaration named `{name}`", decl=name)
    return entry


def nf_of(env: Union[GlobalEnv, CheckReport], name: str) -> Term:
    """Full normal form of a declaration's body (the head itself for an axiom)."""
    if isinstance(env, CheckReport):
        env = env.env
    entry = _entry(env, name)
    if entry.body_term is None:
        return S.Global(name)
    ev = Evaluator(env)
    return run_deep(lambda: ev.quote(entry.value.force(), 0, unfold=True))


def type_of(env: Union[GlobalEnv, CheckReport], name: str) -> Term:
    if isinstance(env, CheckReport):
        env = env.env
    return _entry(env, name).type_term
