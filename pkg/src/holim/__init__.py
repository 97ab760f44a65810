"""A small proof checker for intensional Martin-Löf type theory with a
homotopy-theoretic library of pullbacks, limits and fiber sequences."""

from .corpus import check_corpus, check_files, load_manifest, nf_of
from .kernel import GlobalEnv, check_decl
from .parser import parse, parse_file, print_term, tokenize

__all__ = ["check_corpus", "check_files", "load_manifest", "nf_of", "GlobalEnv", "check_decl",
           "parse", "parse_file", "print_term", "tokenize"]
