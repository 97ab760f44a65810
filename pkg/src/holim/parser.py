"""Lexer, recursive-descent parser and printer for ``.hott`` files.

Grammar (``*`` binds tighter than ``->``, both right associative)::

    file   := ("import" ident | decl)*
    decl   := ("def" | "axiom") ident group* ":" term [":=" term]
    term   := "fun" group+ "=>" term | "Pi" tele "->" term
            | "Sigma" tele "," term | "let" ident ":" term ":=" term "in" term
            | arrow
    arrow  := prod ["->" term]
    prod   := app ["*" prod]
    app    := atom+
    atom   := ident | "@" ident | "_" | keyword | nat | "Type" nat
            | "(" term ")" | "(" term ":" term ")"
            | "(" term ("," term)+ [":" term] ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import LexError, ParseError
from .surface import (CONSTANTS, KEYWORDS, PRIM_ARITY, Group, SAnn, SApp, SArrow, SDecl,
                      SExplicit, SHole, SImport, SKw, SLam, SMetaRef, SNum, SPair, SPi, SProd,
                      SSigma, STerm, SType, SurfaceFile, SVar)
from .syntax import SourceSpan


@dataclass(frozen=True)
class Token:
    kind: str  # ident | keyword | symbol | nat | eof
    lexeme: str
    span: SourceSpan


_SYMBOLS = (":=", "=>", "->", "(", ")", "{", "}", ":", ",", "*", "@", "_")
_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>--[^\n]*)|(?P<nat>[0-9]+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<sym>:=|=>|->|[(){}:,*@])"
)


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    tokens = []
    pos = 0
    line, col = 1, 1
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            span = SourceSpan(file, line, col, line, col)
            raise LexError(f"illegal character {source[pos]!r}", span)
        text = m.group()
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            end_col = col + len(text) - 1
            span = SourceSpan(file, line, col, line, end_col)
            if kind == "ident":
                if text == "_":
                    kind = "symbol"
                elif text in KEYWORDS:
                    kind = "keyword"
            elif kind == "sym":
                kind = "symbol"
            tokens.append(Token(kind, text, span))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(file, line, col, line, col)))
    return tokens


_ATOM_START_KW = frozenset(CONSTANTS) | frozenset(PRIM_ARITY) | {"Type"}


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, lexeme: str) -> bool:
        t = self.tok
        return t.lexeme == lexeme and t.kind in ("symbol", "keyword")

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def fail(self, expected, tok: Optional[Token] = None):
        tok = tok or self.tok
        expected = tuple(sorted(expected))
        found = "end of input" if tok.kind == "eof" else f"`{tok.lexeme}`"
        raise ParseError(f"expected {' or '.join(expected)}, found {found}", tok.span, expected)

    def expect(self, lexeme: str) -> Token:
        if not self.at(lexeme):
            self.fail({f"`{lexeme}`"})
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.fail({"identifier"})
        return self.advance()

    def span_from(self, start: Token) -> SourceSpan:
        prev = self.toks[self.i - 1] if self.i > 0 else start
        return start.span.to(prev.span)

    # file level

    def file(self, path: str) -> SurfaceFile:
        imports, decls = [], []
        while self.tok.kind != "eof":
            if self.at("import"):
                start = self.advance()
                name = self.ident().lexeme
                imports.append(SImport(name, self.span_from(start)))
            elif self.at("def") or self.at("axiom"):
                decls.append(self.decl())
            else:
                self.fail({"`def`", "`axiom`", "`import`"})
        return SurfaceFile(path, imports, decls)

    def decl(self) -> SDecl:
        start = self.advance()
        name = self.ident().lexeme
        params = []
        while self.at("(") or self.at("{"):
            params.append(self.typed_group())
        self.expect(":")
        ty = self.term()
        body = None
        if start.lexeme == "def":
            self.expect(":=")
            body = self.term()
        elif self.at(":="):
            self.fail({"`def`", "`axiom`", "`import`"})
        return SDecl(start.lexeme, name, tuple(params), ty, body, self.span_from(start))

    # binders

    def typed_group(self) -> Group:
        implicit = self.at("{")
        self.advance()
        names = [self.binder_name()]
        while self.tok.kind == "ident" or self.at("_"):
            names.append(self.binder_name())
        self.expect(":")
        ty = self.term()
        self.expect("}" if implicit else ")")
        return Group(tuple(names), ty, implicit)

    def binder_name(self) -> str:
        if self.at("_"):
            self.advance()
            return "_"
        return self.ident().lexeme

    def fun_group(self) -> Group:
        if self.tok.kind == "ident" or self.at("_"):
            return Group((self.binder_name(),))
        if self.at("{"):
            self.advance()
            names = [self.binder_name()]
            while self.tok.kind == "ident" or self.at("_"):
                names.append(self.binder_name())
            ty = None
            if self.at(":"):
                self.advance()
                ty = self.term()
            self.expect("}")
            return Group(tuple(names), ty, True)
        if self.at("("):
            return self.typed_group()
        self.fail({"binder"})

    # terms

    def term(self) -> STerm:
        start = self.tok
        if self.at("fun"):
            self.advance()
            groups = [self.fun_group()]
            while not self.at("=>"):
                groups.append(self.fun_group())
            self.advance()
            body = self.term()
            return SLam(tuple(groups), body, self.span_from(start))
        if self.at("Pi") or self.at("Sigma"):
            kw = self.advance().lexeme
            groups = [self.typed_group()]
            while self.at("(") or self.at("{"):
                groups.append(self.typed_group())
            if kw == "Pi":
                self.expect("->")
                return SPi(tuple(groups), self.term(), self.span_from(start))
            if any(g.implicit for g in groups):
                self.fail({"`(`"}, start)
            self.expect(",")
            return SSigma(tuple(groups), self.term(), self.span_from(start))
        if self.at("let"):
            # let x : T := e in b  ==>  (fun (x : T) => b) e
            self.advance()
            name = self.binder_name()
            self.expect(":")
            ty = self.term()
            self.expect(":=")
            val = self.term()
            self.expect("in")
            body = self.term()
            span = self.span_from(start)
            return SApp(SLam((Group((name,), ty),), body, span), val, span)
        return self.arrow()

    def arrow(self) -> STerm:
        start = self.tok
        lhs = self.prod()
        if self.at("->"):
            self.advance()
            rhs = self.term()
            return SArrow(lhs, rhs, self.span_from(start))
        return lhs

    def prod(self) -> STerm:
        start = self.tok
        lhs = self.app()
        if self.at("*"):
            self.advance()
            rhs = self.prod()
            return SProd(lhs, rhs, self.span_from(start))
        return lhs

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("ident", "nat"):
            return True
        if t.kind == "keyword":
            return t.lexeme in _ATOM_START_KW
        return t.kind == "symbol" and t.lexeme in ("(", "@", "_")

    def app(self) -> STerm:
        start = self.tok
        if not self.starts_atom():
            self.fail({"term"})
        t = self.atom()
        while self.starts_atom():
            arg = self.atom()
            t = SApp(t, arg, self.span_from(start))
        return t

    def atom(self) -> STerm:
        t = self.tok
        if t.kind == "ident":
            self.advance()
            return SVar(t.lexeme, t.span)
        if t.kind == "nat":
            self.advance()
            return SNum(int(t.lexeme), t.span)
        if t.kind == "keyword":
            self.advance()
            if t.lexeme == "Type":
                if self.tok.kind != "nat":
                    self.fail({"universe level"})
                lvl = self.advance()
                return SType(int(lvl.lexeme), t.span.to(lvl.span))
            return SKw(t.lexeme, t.span)
        if self.at("_"):
            self.advance()
            return SHole(t.span)
        if self.at("@"):
            self.advance()
            name = self.ident()
            return SExplicit(name.lexeme, t.span.to(name.span))
        if self.at("("):
            self.advance()
            first = self.term()
            if self.at(")"):
                self.advance()
                return first
            if self.at(":"):
                self.advance()
                ty = self.term()
                self.expect(")")
                return SAnn(first, ty, self.span_from(t))
            if not self.at(","):
                self.fail({"`)`", "`:`", "`,`"})
            items = [first]
            while self.at(","):
                self.advance()
                items.append(self.term())
            ann = None
            if self.at(":"):
                self.advance()
                ann = self.term()
            self.expect(")")
            span = self.span_from(t)
            pair = SPair(items[-2], items[-1], None, span)
            for it in reversed(items[:-2]):
                pair = SPair(it, pair, None, span)
            if ann is not None:
                pair = SPair(pair.fst, pair.snd, ann, span)
            return pair
        self.fail({"term"})


def parse(tokens: list[Token]) -> list[SDecl]:
    """Parse a token stream into declarations (imports are dropped)."""
    return Parser(tokens).file(tokens[0].span.file if tokens else "<input>").decls


def parse_file(source: str, path: str = "<input>") -> SurfaceFile:
    return Parser(tokenize(source, path)).file(path)


def parse_term(source: str, path: str = "<input>") -> STerm:
    p = Parser(tokenize(source, path))
    t = p.term()
    if p.tok.kind != "eof":
        p.fail({"end of input"})
    return t


# --- printing ---------------------------------------------------------------------

# precedence levels
TERM, ARROW, PROD, APP, ATOM = range(5)


def _group(g: Group) -> str:
    names = " ".join(g.names)
    if g.type is None:
        return "{" + names + "}" if g.implicit else names
    inner = f"{names} : {print_term(g.type)}"
    return "{" + inner + "}" if g.implicit else "(" + inner + ")"


def _paren(s: str, needed: bool) -> str:
    return f"({s})" if needed else s


def _pp(t: STerm, prec: int) -> str:
    match t:
        case SVar(name):
            return name
        case SExplicit(name):
            return "@" + name
        case SHole():
            return "_"
        case SKw(name):
            return name
        case SNum(value):
            return str(value)
        case SMetaRef(id):
            return f"?{id}"
        case SType(level):
            return _paren(f"Type {level}", prec > APP)
        case SApp(fn, arg):
            return _paren(f"{_pp(fn, APP)} {_pp(arg, ATOM)}", prec > APP)
        case SLam(binders, body):
            s = "fun " + " ".join(_group(g) for g in binders) + " => " + _pp(body, TERM)
            return _paren(s, prec > TERM)
        case SPi(binders, cod):
            s = "Pi " + " ".join(_group(g) for g in binders) + " -> " + _pp(cod, TERM)
            return _paren(s, prec > TERM)
        case SSigma(binders, snd):
            s = "Sigma " + " ".join(_group(g) for g in binders) + " , " + _pp(snd, TERM)
            return _paren(s, prec > TERM)
        case SArrow(dom, cod):
            return _paren(f"{_pp(dom, PROD)} -> {_pp(cod, TERM)}", prec > ARROW)
        case SProd(a, b):
            return _paren(f"{_pp(a, APP)} * {_pp(b, PROD)}", prec > PROD)
        case SPair():
            items = [_pp(t.fst, TERM)]
            rest = t.snd
            while isinstance(rest, SPair) and rest.ann is None:
                items.append(_pp(rest.fst, TERM))
                rest = rest.snd
            items.append(_pp(rest, TERM))
            ann = f" : {_pp(t.ann, TERM)}" if t.ann is not None else ""
            return "(" + ", ".join(items) + ann + ")"
        case SAnn(term, ty):
            return f"({_pp(term, TERM)} : {_pp(ty, TERM)})"
    raise TypeError(f"cannot print {t!r}")


def print_term(t: STerm) -> str:
    return _pp(t, TERM)


def print_decl(d: SDecl) -> str:
    head = f"{d.kind} {d.name}"
    if d.params:
        head += " " + " ".join(_group(g) for g in d.params)
    s = f"{head} : {print_term(d.type)}"
    if d.body is not None:
        s += f"\n  := {print_term(d.body)}"
    return s


def print_file(f: SurfaceFile) -> str:
    parts = [f"import {i.module}" for i in f.imports]
    if parts:
        parts = ["\n".join(parts)]
    parts += [print_decl(d) for d in f.decls]
    return "\n\n".join(parts) + "\n"


print_ = print_term
