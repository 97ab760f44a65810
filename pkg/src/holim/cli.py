"""Command-line driver: ``holim check|corpus|nf|type``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .corpus import CheckReport, check_corpus, check_files, load_manifest, nf_of, type_of
from .deep import run_deep
from .errors import HolimError
from .kernel import DEFAULT_MAX_LEVEL
from .pretty import show_term

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


@dataclass
class CliConfig:
    command: str
    files: list = field(default_factory=list)
    name: Optional[str] = None
    timing: bool = False
    json: bool = False
    max_universe: int = DEFAULT_MAX_LEVEL
    parallel_parse: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--timing", action="store_true", help="report wall time per file")
    common.add_argument("--json", action="store_true", help="print a machine-readable report")
    common.add_argument("--max-universe", type=int, default=DEFAULT_MAX_LEVEL, metavar="N",
                        help=f"highest universe level allowed (default {DEFAULT_MAX_LEVEL})")
    common.add_argument("--parallel-parse", action="store_true",
                        help="parse files concurrently before checking them in order")

    p = _Parser(prog="holim", description="Check .hott files against a type theory kernel.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    c = sub.add_parser("check", parents=[common], help="check files and their imports")
    c.add_argument("files", nargs="+")
    sub.add_parser("corpus", parents=[common], help="check the corpus named by MANIFEST.tsv")
    for cmd, what in (("nf", "normal form of"), ("type", "type of")):
        q = sub.add_parser(cmd, parents=[common], help=f"print the {what} a declaration")
        q.add_argument("file")
        q.add_argument("name")
    return p


def parse_args(argv) -> CliConfig:
    ns = build_parser().parse_args(argv)
    files = getattr(ns, "files", None) or ([ns.file] if hasattr(ns, "file") else [])
    return CliConfig(ns.command, files, getattr(ns, "name", None), ns.timing, ns.json,
                     ns.max_universe, ns.parallel_parse)


def report_json(report: CheckReport) -> dict:
    per_file = report.per_file()
    files = []
    for path, seconds in report.file_times.items():
        counts = per_file.get(path, {"ok": 0, "failed": 0, "skipped": 0})
        files.append({"path": path, **counts, "elapsed_ms": round(seconds * 1000, 3)})
    failures = []
    for d in report.diagnostics:
        failures.append({
            "name": d.decl,
            "code": d.code,
            "message": d.message,
            "file": d.span.file if d.span else None,
            "line": d.span.line if d.span else None,
            "col": d.span.col if d.span else None,
        })
    totals = report.totals()
    return {
        "files": files,
        "declarations": {"total": sum(totals.values()), **totals},
        "failures": failures,
        "elapsed_ms": round(report.elapsed * 1000, 3),
    }


def _emit(report: CheckReport, cfg: CliConfig, out, err) -> int:
    for d in report.diagnostics:
        print(d.render(), file=err)
    if cfg.json:
        print(json.dumps(report_json(report)), file=out)
    else:
        if cfg.timing:
            for path, seconds in report.file_times.items():
                print(f"{path}: {seconds * 1000:.1f} ms", file=out)
        t = report.totals()
        print(f"{t['ok']} ok, {t['failed']} failed, {t['skipped']} skipped "
              f"in {report.elapsed:.2f} s", file=out)
    return EXIT_OK if report.ok else EXIT_FAILED


def _query(cfg: CliConfig, out, err) -> int:
    report = check_files(cfg.files, cfg.max_universe, parallel_parse=cfg.parallel_parse)
    res = report.result(cfg.name)
    if res is None or res.status != "ok":
        for d in report.diagnostics:
            print(d.render(), file=err)
        if res is None and not report.errors:
            print(f"{cfg.files[0]}: error[E-MISSING]: no declaration named `{cfg.name}`", file=err)
        return EXIT_FAILED
    term = nf_of(report, cfg.name) if cfg.command == "nf" else type_of(report, cfg.name)
    text = run_deep(show_term, term, (), report.env)
    if cfg.json:
        print(json.dumps({"name": cfg.name, cfg.command: text}), file=out)
    else:
        print(text, file=out)
    return EXIT_OK


def run(cfg: CliConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        if cfg.command == "check":
            report = check_files(cfg.files, cfg.max_universe, parallel_parse=cfg.parallel_parse)
            return _emit(report, cfg, out, err)
        if cfg.command == "corpus":
            report = check_corpus(load_manifest(), max_level=cfg.max_universe,
                                  parallel_parse=cfg.parallel_parse)
            return _emit(report, cfg, out, err)
        if cfg.command in ("nf", "type"):
            return _query(cfg, out, err)
    except (OSError, ValueError) as e:
        print(f"holim: error: {e}", file=err)
        return EXIT_USAGE
    except HolimError as e:
        print(e.diagnostic.render(), file=err)
        return EXIT_FAILED
    print(f"holim: error: unknown command {cfg.command!r}", file=err)
    return EXIT_USAGE


def main(argv=None) -> int:
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as e:
        return int(e.code or 0)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
