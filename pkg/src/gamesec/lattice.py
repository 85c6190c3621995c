"""Finite security semilattices with an explicit join table.

A lattice file is line oriented::

    elements: bot a b t
    bottom: bot
    join: a b = t

Joins with the bottom element and self-joins are implied; every other
unordered pair must be declared.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import LatticeError


@dataclass(frozen=True)
class LatticeFile:
    elements: tuple[str, ...]
    bottom: str | None
    joins: tuple[tuple[str, str, str], ...] = ()
    source: str = "<string>"


def parse_lattice_file(text: str, source: str = "<string>") -> LatticeFile:
    elements: list[str] = []
    bottom = None
    joins = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise LatticeError(f"{source}:{lineno}: expected 'key: value', got {raw!r}")
        key = key.strip()
        if key == "elements":
            elements.extend(rest.split())
        elif key == "bottom":
            toks = rest.split()
            if len(toks) != 1:
                raise LatticeError(f"{source}:{lineno}: bottom takes exactly one element")
            bottom = toks[0]
        elif key == "join":
            lhs, eq, rhs = rest.partition("=")
            operands, result = lhs.split(), rhs.split()
            if not eq or len(operands) != 2 or len(result) != 1:
                raise LatticeError(f"{source}:{lineno}: expected 'join: x y = z'")
            joins.append((operands[0], operands[1], result[0]))
        else:
            raise LatticeError(f"{source}:{lineno}: unknown key {key!r}")
    return LatticeFile(tuple(elements), bottom, tuple(joins), source)


@dataclass(frozen=True)
class SecurityLattice:
    """A validated join-semilattice.  Levels are plain element names."""

    elements: tuple[str, ...]
    bottom: str
    table: dict = field(compare=False, hash=False, repr=False)
    signature: tuple = field(default=(), repr=False)

    def check(self, level: str) -> str:
        if level not in self.table:
            raise LatticeError(f"unknown level {level!r}; lattice has {list(self.elements)}")
        return level

    def join(self, l1: str, l2: str) -> str:
        self.check(l1)
        self.check(l2)
        return self.table[l1][l2]

    def join_all(self, levels: Iterable[str]) -> str:
        out = self.bottom
        for lv in levels:
            out = self.join(out, lv)
        return out

    def leq(self, l1: str, l2: str) -> bool:
        return self.join(l1, l2) == l2

    def describe(self) -> dict:
        pairs = []
        for a, b in itertools.combinations(self.elements, 2):
            pairs.append([a, b, self.table[a][b]])
        return {"elements": list(self.elements), "bottom": self.bottom, "joins": pairs}

    def to_text(self) -> str:
        lines = [f"elements: {' '.join(self.elements)}", f"bottom: {self.bottom}"]
        for a, b in itertools.combinations(self.elements, 2):
            if self.bottom not in (a, b):
                lines.append(f"join: {a} {b} = {self.table[a][b]}")
        return "\n".join(lines) + "\n"


def validate_lattice(decl: LatticeFile) -> SecurityLattice:
    """Close the declared table and check the semilattice laws.

    Raises LatticeError whose ``violations`` lists every failed law.
    """
    problems: list[str] = []
    elements = list(dict.fromkeys(decl.elements))
    if len(elements) != len(decl.elements):
        problems.append("duplicate element names")
    if not elements:
        raise LatticeError("no elements declared", ["no elements declared"])
    if decl.bottom is None:
        raise LatticeError("missing bottom declaration", ["missing bottom"])
    if decl.bottom not in elements:
        raise LatticeError(f"bottom {decl.bottom!r} is not a declared element",
                           [f"bottom {decl.bottom!r} undeclared"])
    known = set(elements)
    table: dict[str, dict[str, str]] = {e: {} for e in elements}
    for e in elements:
        table[e][e] = e
        table[decl.bottom][e] = e
        table[e][decl.bottom] = e
    for a, b, c in decl.joins:
        bad = [x for x in (a, b, c) if x not in known]
        if bad:
            problems.append(f"join {a} {b} = {c} names undeclared element(s) {bad}")
            continue
        prev = table[a].get(b)
        if prev is not None and prev != c:
            problems.append(f"commutativity: {a} ⊔ {b} declared as both {prev} and {c}")
        else:
            table[a][b] = table[b][a] = c
    if problems:
        raise LatticeError("; ".join(problems), problems)
    _close_by_order(elements, table)
    missing = [(a, b) for a, b in itertools.combinations(elements, 2) if b not in table[a]]
    if missing:
        msgs = [f"totality: no join declared for {a} {b}" for a, b in missing]
        raise LatticeError("; ".join(msgs), msgs)
    for a, b in itertools.combinations(elements, 2):
        if table[a][b] != table[b][a]:
            problems.append(f"commutativity: {a} ⊔ {b} = {table[a][b]} but {b} ⊔ {a} = {table[b][a]}")
    for a in elements:
        if table[a][a] != a:
            problems.append(f"idempotence fails at {a}")
        if table[decl.bottom][a] != a:
            problems.append(f"unit fails at {a}")
    for a, b, c in itertools.product(elements, repeat=3):
        left = table[table[a][b]][c]
        right = table[a][table[b][c]]
        if left != right:
            problems.append(f"associativity: ({a} ⊔ {b}) ⊔ {c} = {left} but {a} ⊔ ({b} ⊔ {c}) = {right}")
    if problems:
        raise LatticeError("; ".join(problems[:5]), problems)
    signature = tuple(sorted((a, b, table[a][b]) for a in elements for b in elements))
    return SecurityLattice(tuple(elements), decl.bottom, table, signature)


def _close_by_order(elements, table):
    # x ⊔ y = z gives x ≤ z and y ≤ z; an undeclared comparable pair joins to the larger.
    below = {e: {e} for e in elements}
    for x in elements:
        for y, z in table[x].items():
            below[z].update((x, y))
    changed = True
    while changed:
        changed = False
        for z in elements:
            extra = set().union(*(below[y] for y in below[z])) - below[z]
            if extra:
                below[z] |= extra
                changed = True
    for a, b in itertools.combinations(elements, 2):
        if b in table[a]:
            continue
        if a in below[b]:
            table[a][b] = table[b][a] = b
        elif b in below[a]:
            table[a][b] = table[b][a] = a


def load_lattice(path) -> SecurityLattice:
    path = Path(path)
    return validate_lattice(parse_lattice_file(path.read_text(encoding="utf-8"), str(path)))


def lattice_from_text(text: str) -> SecurityLattice:
    return validate_lattice(parse_lattice_file(text))


def chain(*names: str) -> SecurityLattice:
    """A total order, least element first."""
    joins = [(a, b, b) for a, b in zip(names[1:], names[2:])]
    return validate_lattice(LatticeFile(tuple(names), names[0], tuple(joins)))


L4_TEXT = """\
elements: bot a b t
bottom: bot
join: a b = t
"""


def l4() -> SecurityLattice:
    """The diamond bot < a, b < t with a and b incomparable."""
    return lattice_from_text(L4_TEXT)
