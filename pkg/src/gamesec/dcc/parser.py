"""Term and program-file parsers.

Terms::

    e ::= IDENT | '\\' IDENT ':' T '.' e | e e | 'eta' '<' LEVEL '>' e
        | 'bind' IDENT '=' e 'in' e | NAME '#' N | '(' e ')'

Program files hold one directive per line; indented lines continue the
previous directive and ``#`` starts a comment::

    base NAME@LEVEL/ARITY
    assume IDENT : T
    check e : T
    normalize e
    noninterference IDENT in e : T
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import TypeSyntaxError
from ..lattice import SecurityLattice
from ..types import GameType, TypeParser
from .terms import App, Bind, Const, EtaM, Lam, Term, Var

KEYWORDS = {"eta", "bind", "in"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<limp>-o(?![A-Za-z0-9_]))
  | (?P<arrow>->)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[*&!\[\]()@/\\:.<>=\#])
""", re.VERBOSE)


def tokenize(text: str, line: int = 1, col: int = 1):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TypeSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind, val = m.lastgroup, m.group()
        if kind != "ws":
            out.append((val if kind == "sym" else kind, val, line, col))
        for ch in val:
            line, col = (line + 1, 1) if ch == "\n" else (line, col + 1)
        pos = m.end()
    out.append(("eof", "", line, col))
    return out


class TermParser(TypeParser):
    def __init__(self, tokens, lat: SecurityLattice | None = None, bases=None, pos=0):
        super().__init__(tokens, lat, bases, pos)

    def keyword(self, word):
        tok = self.peek()
        if tok[0] != "ident" or tok[1] != word:
            self.error(f"expected {word!r}, found {tok[1] or 'end of input'!r}")
        self.pos += 1

    def ident(self):
        tok = self.expect("ident")
        if tok[1] in KEYWORDS:
            self.error(f"keyword {tok[1]!r} used as a name", tok)
        return tok[1]

    def term(self) -> Term:
        tok = self.peek()
        if tok[0] == "\\":
            self.pos += 1
            name = self.ident()
            self.expect(":")
            ann = self.parse_type()
            self.expect(".")
            return Lam(name, ann, self.term())
        if tok[0] == "ident" and tok[1] == "eta":
            self.pos += 1
            self.expect("<")
            lv = self.level()
            self.expect(">")
            if not self.starts_term():
                self.error("eta needs a body")
            return EtaM(lv, self.term())
        if tok[0] == "ident" and tok[1] == "bind":
            self.pos += 1
            name = self.ident()
            self.expect("=")
            bound = self.term()
            self.keyword("in")
            return Bind(name, bound, self.term())
        return self.application()

    def starts_term(self):
        tok = self.peek()
        return tok[0] in ("(", "\\") or (tok[0] == "ident" and tok[1] != "in")

    def application(self) -> Term:
        e = self.atom()
        while self.starts_term():
            tok = self.peek()
            if tok[0] == "\\" or tok[1] in ("eta", "bind"):
                e = App(e, self.term())
                break
            e = App(e, self.atom())
        return e

    def atom(self) -> Term:
        tok = self.peek()
        if tok[0] == "(":
            self.pos += 1
            e = self.term()
            self.expect(")")
            return e
        if tok[0] == "ident" and tok[1] not in KEYWORDS:
            self.pos += 1
            if self.peek()[0] == "#":
                self.pos += 1
                num = self.expect("num")
                base = self.bases.get(tok[1])
                if base is None:
                    self.error(f"unknown base type {tok[1]!r} in constant", tok)
                value = int(num[1])
                if value >= base.arity:
                    self.error(f"constant {tok[1]}#{value} out of range for arity {base.arity}", num)
                return Const(base, value)
            return Var(tok[1])
        self.error(f"expected a term, found {tok[1] or 'end of input'!r}")

    def done(self):
        if self.peek()[0] != "eof":
            self.error(f"unexpected {self.peek()[1]!r}")


def parse_term(text: str, lat: SecurityLattice | None = None, bases=None) -> Term:
    p = TermParser(tokenize(text), lat, bases)
    e = p.term()
    p.done()
    return e


# ---------------------------------------------------------------- programs

@dataclass
class Directive:
    kind: str  # check | normalize | noninterference
    term: Term
    type: GameType | None = None
    var: str | None = None
    line: int = 0
    source: str = ""


@dataclass
class Program:
    bases: dict = field(default_factory=dict)
    assumptions: list = field(default_factory=list)  # (name, type)
    directives: list = field(default_factory=list)


def _logical_lines(text: str):
    """Join indented continuation lines; yield (line number, text)."""
    current, start = None, 0
    for n, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if line[0].isspace() and current is not None:
            current += " " + line.strip()
            continue
        if current is not None:
            yield start, current
        current, start = line.strip(), n
    if current is not None:
        yield start, current


def _strip_comment(raw: str) -> str:
    # a '#' directly after a name is a constant, anything else opens a comment
    for m in re.finditer("#", raw):
        i = m.start()
        if i == 0 or not (raw[i - 1].isalnum() or raw[i - 1] == "_"):
            return raw[:i]
    return raw


def parse_program(text: str, lat: SecurityLattice) -> Program:
    prog = Program()
    for line_no, line in _logical_lines(text):
        word, _, rest = line.partition(" ")
        toks = tokenize(rest, line_no, len(word) + 2)
        p = TermParser(toks, lat, prog.bases)
        if word == "base":
            t = p.flat(explicit=False)
            p.done()
            prog.bases[t.name] = t
        elif word == "assume":
            name = p.ident()
            p.expect(":")
            t = p.parse_type()
            p.done()
            if any(n == name for n, _ in prog.assumptions):
                raise TypeSyntaxError(f"assumption {name!r} declared twice", line_no, 1)
            prog.assumptions.append((name, t))
        elif word == "check":
            e = p.term()
            p.expect(":")
            t = p.parse_type()
            p.done()
            prog.directives.append(Directive("check", e, t, None, line_no, rest))
        elif word == "normalize":
            e = p.term()
            p.done()
            prog.directives.append(Directive("normalize", e, None, None, line_no, rest))
        elif word == "noninterference":
            var = p.ident()
            p.keyword("in")
            e = p.term()
            p.expect(":")
            t = p.parse_type()
            p.done()
            prog.directives.append(Directive("noninterference", e, t, var, line_no, rest))
        else:
            raise TypeSyntaxError(f"unknown directive {word!r}", line_no, 1)
    return prog
