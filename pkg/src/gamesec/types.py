"""Object-level type syntax.  Every game in the package is the denotation
of one of these trees."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import TypeSyntaxError
from .lattice import SecurityLattice


@dataclass(frozen=True)
class Flat:
    name: str
    arity: int
    level: str

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Unit:
    def __str__(self):
        return "I"


@dataclass(frozen=True)
class Tensor:
    left: "GameType"
    right: "GameType"

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class With:
    left: "GameType"
    right: "GameType"

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Limp:
    dom: "GameType"
    cod: "GameType"

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Bang:
    body: "GameType"

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Monad:
    level: str
    body: "GameType"

    def __str__(self):
        return to_text(self)


GameType = Union[Flat, Unit, Tensor, With, Limp, Bang, Monad]
I = Unit()


def arrow(dom: GameType, cod: GameType) -> Limp:
    """``A -> B`` is ``!A -o B``."""
    return Limp(Bang(dom), cod)


def as_arrow(t: GameType):
    """Return (A, B) when t is literally ``!A -o B``, else None."""
    if isinstance(t, Limp) and isinstance(t.dom, Bang):
        return t.dom.body, t.cod
    return None


def levels_in(t: GameType) -> set[str]:
    if isinstance(t, Flat):
        return {t.level}
    if isinstance(t, Unit):
        return set()
    if isinstance(t, Monad):
        return {t.level} | levels_in(t.body)
    if isinstance(t, (Bang,)):
        return levels_in(t.body)
    a, b = _children(t)
    return levels_in(a) | levels_in(b)


def _children(t):
    if isinstance(t, (Tensor, With)):
        return t.left, t.right
    if isinstance(t, Limp):
        return t.dom, t.cod
    raise TypeError(t)


def check_levels(t: GameType, lat: SecurityLattice) -> GameType:
    for lv in levels_in(t):
        lat.check(lv)
    return t


def canonical(t: GameType, lat: SecurityLattice, acc: str | None = None) -> GameType:
    """Normal form up to identical denotation.

    Monads merge (``[l][l']A`` is ``[l ⊔ l']A``), vanish at bottom, and move
    through ⊗, &, ! and onto flat leaves.  They stop at -o: a level monad
    keeps the plays of its body, while ``[l]A -o [l]B`` re-checks the
    cross-component level condition at the raised levels, so the two games
    can differ.
    """
    acc = lat.bottom if acc is None else acc
    if isinstance(t, Flat):
        return Flat(t.name, t.arity, lat.join(acc, t.level))
    if isinstance(t, Unit):
        return t
    if isinstance(t, Monad):
        return canonical(t.body, lat, lat.join(acc, t.level))
    if isinstance(t, Bang):
        return Bang(canonical(t.body, lat, acc))
    if isinstance(t, Limp):
        inner = Limp(canonical(t.dom, lat), canonical(t.cod, lat))
        return inner if acc == lat.bottom else Monad(acc, inner)
    a, b = _children(t)
    return type(t)(canonical(a, lat, acc), canonical(b, lat, acc))


def same_game(s: GameType, t: GameType, lat: SecurityLattice) -> bool:
    return canonical(s, lat) == canonical(t, lat)


def erase_type(t: GameType, level: str, lat: SecurityLattice, acc: str | None = None) -> GameType:
    """Replace every part whose moves sit at a level ≥ ``level`` by I.

    A subterm ``[l']B`` with ``level ≤ l'`` always goes.  Flat leaves whose own
    level (joined with the enclosing monads) reaches ``level`` go as well, so
    the erased game is exactly the original minus its high moves.
    """
    acc = lat.bottom if acc is None else acc
    if isinstance(t, Flat):
        return Unit() if lat.leq(level, lat.join(acc, t.level)) else t
    if isinstance(t, Unit):
        return t
    if isinstance(t, Monad):
        inner = lat.join(acc, t.level)
        if lat.leq(level, inner):
            return Unit()
        return Monad(t.level, erase_type(t.body, level, lat, inner))
    if isinstance(t, Bang):
        return Bang(erase_type(t.body, level, lat, acc))
    a, b = _children(t)
    return type(t)(erase_type(a, level, lat, acc), erase_type(b, level, lat, acc))


def size(t: GameType) -> int:
    if isinstance(t, (Flat, Unit)):
        return 1
    if isinstance(t, (Bang, Monad)):
        return 1 + size(t.body)
    a, b = _children(t)
    return 1 + size(a) + size(b)


# ---------------------------------------------------------------- printing

_PREC = {Limp: 1, Tensor: 2, With: 2}


def to_text(t: GameType, prec: int = 0, arrows: bool = True) -> str:
    if isinstance(t, Flat):
        return f"{t.name}@{t.level}/{t.arity}"
    if isinstance(t, Unit):
        return "I"
    if isinstance(t, Bang):
        return "!" + to_text(t.body, 3, arrows)
    if isinstance(t, Monad):
        return f"[{t.level}]" + to_text(t.body, 3, arrows)
    if isinstance(t, Limp):
        pair = as_arrow(t) if arrows else None
        if pair:
            out = f"{to_text(pair[0], 2, arrows)} -> {to_text(pair[1], 1, arrows)}"
        else:
            out = f"{to_text(t.dom, 2, arrows)} -o {to_text(t.cod, 1, arrows)}"
        return f"({out})" if prec > 1 else out
    op = " * " if isinstance(t, Tensor) else " & "
    out = to_text(t.left, 2, arrows) + op + to_text(t.right, 3, arrows)
    return f"({out})" if prec > 2 else out


# ----------------------------------------------------------------- parsing

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<limp>-o(?![A-Za-z0-9_]))
  | (?P<arrow>->)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[*&!\[\]()@/])
""", re.VERBOSE)


def tokenize(text: str):
    """Yield (kind, value, line, col) tuples, ending with an 'eof' token."""
    pos, line, col = 0, 1, 1
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TypeSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        val = m.group()
        if kind != "ws":
            if kind == "sym":
                kind = val
            out.append((kind, val, line, col))
        for ch in val:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    out.append(("eof", "", line, col))
    return out


class TypeParser:
    """Recursive-descent parser over a shared token list.

    ``bases`` maps declared base names to their Flat type; an undeclared bare
    name defaults to arity 1 at the bottom level.
    """

    def __init__(self, tokens, lat: SecurityLattice | None = None, bases=None, pos=0):
        self.toks = tokens
        self.pos = pos
        self.lat = lat
        self.bases = bases if bases is not None else {}

    def peek(self, offset=0):
        return self.toks[min(self.pos + offset, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise TypeSyntaxError(msg, tok[2], tok[3])

    def expect(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            self.error(f"expected {kind!r}, found {tok[1] or 'end of input'!r}")
        self.pos += 1
        return tok

    def level(self):
        tok = self.expect("ident")
        if self.lat is not None and tok[1] not in self.lat.table:
            self.error(f"unknown level {tok[1]!r}", tok)
        return tok[1]

    def parse_type(self):
        left = self.product()
        kind = self.peek()[0]
        if kind in ("limp", "arrow"):
            self.pos += 1
            right = self.parse_type()
            return Limp(left, right) if kind == "limp" else arrow(left, right)
        return left

    def product(self):
        left = self.prefix()
        while self.peek()[0] in ("*", "&"):
            op = self.expect(self.peek()[0])[0]
            right = self.prefix()
            left = Tensor(left, right) if op == "*" else With(left, right)
        return left

    def prefix(self):
        tok = self.peek()
        if tok[0] == "!":
            self.pos += 1
            return Bang(self.prefix())
        if tok[0] == "[":
            self.pos += 1
            lv = self.level()
            self.expect("]")
            return Monad(lv, self.prefix())
        if tok[0] == "(":
            self.pos += 1
            t = self.parse_type()
            self.expect(")")
            return t
        if tok[0] == "ident":
            if tok[1] == "I" and self.peek(1)[0] != "@":
                self.pos += 1
                return Unit()
            if tok[1] == "base":
                self.pos += 1
                return self.flat(explicit=True)
            return self.flat(explicit=False)
        self.error(f"expected a type, found {tok[1] or 'end of input'!r}")

    def flat(self, explicit):
        name = self.expect("ident")[1]
        level = arity = None
        if self.peek()[0] == "@":
            self.pos += 1
            level = self.level()
        elif explicit:
            self.error("base type needs '@ LEVEL'")
        if self.peek()[0] == "/":
            self.pos += 1
            arity = int(self.expect("num")[1])
            if arity < 1:
                self.error("arity must be at least 1")
        declared = self.bases.get(name)
        if level is None and arity is None and declared is not None:
            return declared
        if level is None:
            level = declared.level if declared else (self.lat.bottom if self.lat else "bot")
        if arity is None:
            arity = declared.arity if declared else 1
        return Flat(name, arity, level)


def parse_type(text: str, lat: SecurityLattice | None = None, bases=None) -> GameType:
    p = TypeParser(tokenize(text), lat, bases)
    t = p.parse_type()
    if p.peek()[0] != "eof":
        p.error(f"unexpected {p.peek()[1]!r} after type")
    return t
