"""Prolog-like surface syntax to an untyped AST.

Grammar (``=`` is term equality, ``%`` starts a comment)::

    program  := (decl | clause)*
    decl     := "#type" NAME ":" type "."
    type     := "i" | "o" | "(" type ")" | type "->" type     (right assoc)
    clause   := head (":-" body)? "."
    body     := atom ("," atom)*
    atom     := term ("=" term)?
    term     := (VAR | NAME) ("(" term ("," term)* ")")*

Whether ``f(a)`` is a function application or a predicate application is
decided by type inference, not here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import Issue, ParseError
from .typesys import IOTA, OMICRON, Arrow, Type


@dataclass(frozen=True)
class SourceFile:
    text: str
    path: str = "<string>"

    @classmethod
    def from_path(cls, path) -> "SourceFile":
        return cls(Path(path).read_text(encoding="utf-8"), str(path))

    def position(self, offset: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, offset) + 1
        start = self.text.rfind("\n", 0, offset) + 1
        return line, offset - start + 1


# Untyped AST.  Positions are excluded from equality so that round-trip
# tests compare structure only.

@dataclass(frozen=True)
class RVar:
    name: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RName:
    name: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RCall:
    """``fun(args...)``: one parenthesised argument list."""

    fun: object
    args: tuple
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class REq:
    left: object
    right: object
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RClause:
    head: object
    body: tuple = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RTypeDecl:
    name: str
    type: Type
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RProgram:
    decls: tuple = ()
    clauses: tuple = ()


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<decl>\#type\b)
  | (?P<neck>:-)
  | (?P<arrow>->)
  | (?P<colon>:)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<comma>,)
  | (?P<dot>\.)
  | (?P<eq>=)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z][A-Za-z0-9_]*|[0-9]+)
""", re.VERBOSE)

_DESCR = {
    "decl": "'#type'", "neck": "':-'", "arrow": "'->'", "colon": "':'",
    "lpar": "'('", "rpar": "')'", "comma": "','", "dot": "'.'", "eq": "'='",
    "var": "variable", "name": "name", "eof": "end of input",
}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    column: int


def tokenize(src: SourceFile):
    toks, errors = [], []
    pos, text = 0, src.text
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            line, col = src.position(pos)
            errors.append(Issue("UnexpectedCharacter", f"unexpected character {text[pos]!r}", line, col))
            pos += 1
            continue
        if m.lastgroup != "ws":
            line, col = src.position(pos)
            toks.append(_Tok(m.lastgroup, m.group(), line, col))
        pos = m.end()
    line, col = src.position(len(text))
    toks.append(_Tok("eof", "", line, col))
    return toks, errors


class _Recover(Exception):
    pass


class _Parser:
    def __init__(self, src: SourceFile):
        self.toks, self.errors = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected):
        t = self.tok
        got = _DESCR[t.kind] if t.kind == "eof" else repr(t.text)
        exp = ", ".join(sorted(_DESCR[k] for k in expected))
        code = "UnterminatedClause" if t.kind == "eof" else "UnexpectedToken"
        self.errors.append(Issue(code, f"expected one of {{{exp}}}, got {got}", t.line, t.column))
        raise _Recover

    def expect(self, kind) -> _Tok:
        if self.tok.kind != kind:
            self.fail({kind})
        t = self.tok
        self.i += 1
        return t

    def accept(self, kind):
        if self.tok.kind == kind:
            t = self.tok
            self.i += 1
            return t
        return None

    def program(self) -> RProgram:
        decls, clauses = [], []
        while self.tok.kind != "eof":
            try:
                if self.tok.kind == "decl":
                    decls.append(self.decl())
                else:
                    clauses.append(self.clause())
            except _Recover:
                while self.tok.kind not in ("dot", "eof"):
                    self.i += 1
                self.accept("dot")
        return RProgram(tuple(decls), tuple(clauses))

    def decl(self) -> RTypeDecl:
        start = self.expect("decl")
        name = self.expect("name")
        self.expect("colon")
        t = self.type_()
        self.expect("dot")
        return RTypeDecl(name.text, t, start.line, start.column)

    def type_(self) -> Type:
        if self.accept("lpar"):
            t = self.type_()
            self.expect("rpar")
        else:
            tok = self.tok
            if tok.kind != "name" or tok.text not in ("i", "o"):
                self.fail({"lpar", "name"})
            self.i += 1
            t = IOTA if tok.text == "i" else OMICRON
        if self.accept("arrow"):
            return Arrow(t, self.type_())
        return t

    def clause(self) -> RClause:
        start = self.tok
        head = self.term()
        body = []
        if self.accept("neck"):
            body.append(self.atom())
            while self.accept("comma"):
                body.append(self.atom())
        if self.tok.kind != "dot":
            self.fail({"dot", "neck", "comma", "lpar"} if not body else {"dot", "comma"})
        self.i += 1
        return RClause(head, tuple(body), start.line, start.column)

    def atom(self):
        left = self.term()
        if self.tok.kind == "eq":
            t = self.tok
            self.i += 1
            return REq(left, self.term(), t.line, t.column)
        return left

    def term(self):
        t = self.tok
        if t.kind == "var":
            node = RVar(t.text, t.line, t.column)
        elif t.kind == "name":
            node = RName(t.text, t.line, t.column)
        else:
            self.fail({"var", "name"})
        self.i += 1
        while self.tok.kind == "lpar":
            lp = self.tok
            self.i += 1
            if self.tok.kind == "rpar":
                self.errors.append(Issue("EmptyArgumentList", "empty argument list", lp.line, lp.column))
                raise _Recover
            args = [self.term()]
            while self.accept("comma"):
                args.append(self.term())
            self.expect("rpar")
            node = RCall(node, tuple(args), t.line, t.column)
        return node


def parse(src) -> RProgram:
    """Parse a SourceFile (or plain string).  Raises ParseError listing every syntax error."""
    if isinstance(src, str):
        src = SourceFile(src)
    p = _Parser(src)
    prog = p.program()
    if p.errors:
        raise ParseError(p.errors)
    return prog


def parse_type(text: str) -> Type:
    """Parse a type such as ``(i -> o) -> o``."""
    p = _Parser(SourceFile(text))
    try:
        t = p.type_()
        if p.tok.kind != "eof":
            p.fail({"arrow", "eof"})
    except _Recover:
        pass
    if p.errors:
        raise ParseError(p.errors)
    return t


def parse_file(path) -> RProgram:
    return parse(SourceFile.from_path(path))


def format_term(t) -> str:
    if isinstance(t, (RVar, RName)):
        return t.name
    if isinstance(t, RCall):
        return f"{format_term(t.fun)}({', '.join(format_term(a) for a in t.args)})"
    if isinstance(t, REq):
        return f"{format_term(t.left)} = {format_term(t.right)}"
    raise TypeError(t)


def format_clause(c: RClause) -> str:
    head = format_term(c.head)
    if not c.body:
        return head + "."
    return f"{head} :- {', '.join(format_term(b) for b in c.body)}."


def format_program(p: RProgram) -> str:
    lines = [f"#type {d.name} : {d.type}." for d in p.decls]
    lines += [format_clause(c) for c in p.clauses]
    return "\n".join(lines) + ("\n" if lines else "")
