"""Justified AJM games with levels, as denotations of GameType trees.

Moves are nested tuples ("tags") recording the path through the type:

    ('q',) / ('a', v)     question and answers of a flat game
    ('L', m) / ('R', m)   left/right of a tensor or with
    ('!', i, m)           copy i of a bang
    ('A', b, m) / ('B', m)  argument copy for initial codomain move b / codomain
                          (b is written in the codomain's own tags)

Level monads add no tag, so ``[l]A`` and ``A`` share their move set.
"""
from __future__ import annotations

import functools
import os
import time
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

from .errors import BudgetError, MembershipError
from .lattice import SecurityLattice
from .types import Bang, Flat, GameType, Limp, Monad, Tensor, Unit, With

O, P = "O", "P"
Q, A = "Q", "A"

Move = tuple
Play = tuple


class MoveInfo(NamedTuple):
    polarity: str
    kind: str
    level: str
    justifier: Move | None


@dataclass(frozen=True)
class PlayDiagnostic:
    condition: str  # p1..p6, or 'restriction' for per-construction membership
    position: int
    reason: str

    def as_dict(self):
        return {"condition": self.condition, "position": self.position, "reason": self.reason}


def serialize(m) -> str:
    """S-expression form of a move tag; stable across runs."""
    if isinstance(m, tuple):
        return "(" + " ".join(serialize(x) for x in m) + ")"
    return str(m)


def parse_sexp(text: str):
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def read():
        nonlocal pos
        tok = toks[pos]
        pos += 1
        if tok == "(":
            items = []
            while toks[pos] != ")":
                items.append(read())
            pos += 1
            return tuple(items)
        return int(tok) if tok.isdigit() else tok

    out = read()
    if pos != len(toks):
        raise ValueError(f"trailing input in {text!r}")
    return out


@functools.lru_cache(maxsize=None)
def move_key(m) -> str:
    return serialize(m)


def play_key(s):
    return tuple(move_key(m) for m in s)


def serialize_play(s) -> list[str]:
    return [serialize(m) for m in s]


class GameView:
    """The bounded move structure of ``denote(t, k)``."""

    def __init__(self, t: GameType, lat: SecurityLattice, k: int, acc: str | None = None):
        if k < 1:
            raise ValueError("copy bound must be at least 1")
        self.type = t
        self.lat = lat
        self.k = k
        self.children: dict = {}
        info: dict = {}
        if isinstance(t, Flat):
            self.kind = "flat"
            info[("q",)] = MoveInfo(O, Q, t.level, None)
            for v in range(t.arity):
                info[("a", v)] = MoveInfo(P, A, t.level, ("q",))
        elif isinstance(t, Unit):
            self.kind = "unit"
        elif isinstance(t, Monad):
            self.kind = "monad"
            inner = view(t.body, lat, k)
            self.children["body"] = inner
            for m, mi in inner.info.items():
                info[m] = mi._replace(level=lat.join(mi.level, t.level))
        elif isinstance(t, (Tensor, With)):
            self.kind = "tensor" if isinstance(t, Tensor) else "with"
            for side, sub in (("L", t.left), ("R", t.right)):
                v = view(sub, lat, k)
                self.children[side] = v
                for m, mi in v.info.items():
                    j = None if mi.justifier is None else (side, mi.justifier)
                    info[(side, m)] = mi._replace(justifier=j)
        elif isinstance(t, Bang):
            self.kind = "bang"
            v = view(t.body, lat, k)
            self.children["body"] = v
            for i in range(k):
                for m, mi in v.info.items():
                    j = None if mi.justifier is None else ("!", i, mi.justifier)
                    info[("!", i, m)] = mi._replace(justifier=j)
        elif isinstance(t, Limp):
            self.kind = "limp"
            va, vb = view(t.dom, lat, k), view(t.cod, lat, k)
            self.children["A"], self.children["B"] = va, vb
            for b in vb.initials:
                for m, mi in va.info.items():
                    j = ("B", b) if mi.justifier is None else ("A", b, mi.justifier)
                    pol = P if mi.polarity == O else O
                    info[("A", b, m)] = MoveInfo(pol, mi.kind, mi.level, j)
            for m, mi in vb.info.items():
                j = None if mi.justifier is None else ("B", mi.justifier)
                info[("B", m)] = mi._replace(justifier=j)
        else:
            raise TypeError(f"not a game type: {t!r}")
        self.info = info
        self.moves = sorted(info, key=move_key)
        self.initials = [m for m in self.moves if info[m].justifier is None]

    # -- queries -------------------------------------------------------
    def __contains__(self, m):
        return m in self.info

    def polarity(self, m):
        return self._get(m).polarity

    def kind_of(self, m):
        return self._get(m).kind

    def level(self, m):
        return self._get(m).level

    def justifier(self, m):
        return self._get(m).justifier

    def _get(self, m):
        try:
            return self.info[m]
        except KeyError:
            raise MembershipError(f"move {serialize(m)} is not in {self.type} at copy bound {self.k}")

    def describe(self):
        return [
            {"move": serialize(m), "polarity": mi.polarity, "kind": mi.kind, "level": mi.level,
             "justifier": None if mi.justifier is None else serialize(mi.justifier)}
            for m, mi in ((m, self.info[m]) for m in self.moves)
        ]


@functools.lru_cache(maxsize=4096)
def view(t: GameType, lat: SecurityLattice, k: int) -> GameView:
    return GameView(t, lat, k)


def denote(t: GameType, lat: SecurityLattice, copy_bound: int = 2) -> GameView:
    return view(t, lat, copy_bound)


# ------------------------------------------------------------ restrictions

def restrict(v: GameView, s, part):
    """Restriction of ``s`` to a component, with the component's tags removed."""
    if v.kind == "monad":
        return tuple(s)
    if v.kind in ("tensor", "with"):
        return tuple(m[1] for m in s if m[0] == part)
    if v.kind == "bang":
        return tuple(m[2] for m in s if m[1] == part)
    if v.kind == "limp":
        if part == "B":
            return tuple(m[1] for m in s if m[0] == "B")
        if part == "A":
            return tuple(m[2] for m in s if m[0] == "A")
        return tuple(m[2] for m in s if m[0] == "A" and m[1] == part)
    raise ValueError(f"no components in a {v.kind} game")


def _pending(v: GameView, s):
    stack = []
    for m in s:
        mi = v.info[m]
        if mi.kind == Q:
            stack.append(m)
        elif stack and stack[-1] == mi.justifier:
            stack.pop()
    return stack


def extension_ok(v: GameView, s, m) -> bool:
    """Whether ``s·m`` is a play, assuming ``s`` already is one."""
    mi = v.info.get(m)
    if mi is None or m in s:
        return False
    if not s:
        if mi.polarity != O:
            return False
    elif v.info[s[-1]].polarity == mi.polarity:
        return False
    j = mi.justifier
    if j is not None:
        if j not in s or not v.lat.leq(mi.level, v.info[j].level):
            return False
        if mi.kind == A:
            st = _pending(v, s)
            if not st or st[-1] != j:
                return False
    kind = v.kind
    if kind in ("flat", "unit"):
        return True
    if kind == "monad":
        return extension_ok(v.children["body"], s, m)
    if kind in ("tensor", "with"):
        side = m[0]
        if kind == "with" and s and s[0][0] != side:
            return False
        return extension_ok(v.children[side], restrict(v, s, side), m[1])
    if kind == "bang":
        return extension_ok(v.children["body"], restrict(v, s, m[1]), m[2])
    part = m[0]
    return extension_ok(v.children[part], restrict(v, s, part), m[-1])


def is_play(v: GameView, s) -> bool:
    s = tuple(s)
    return all(extension_ok(v, s[:i], s[i]) for i in range(len(s)))


def extensions(v: GameView, s):
    """All moves m with ``s·m`` a play (``s`` assumed a play), in tag order."""
    s = tuple(s)
    present = set(s)
    want = O if not s or v.info[s[-1]].polarity == P else P
    out = []
    for m in v.moves:
        mi = v.info[m]
        if mi.polarity != want or m in present:
            continue
        if mi.justifier is not None and mi.justifier not in present:
            continue
        if extension_ok(v, s, m):
            out.append(m)
    return out


def validate_play(v: GameView, s) -> list[PlayDiagnostic]:
    """Every violated play condition, with positions.  Empty means valid.

    Foreign moves raise MembershipError instead of producing a diagnostic.
    """
    s = tuple(s)
    for m in s:
        v._get(m)
    return _diagnose(v, s, list(range(len(s))), "")


def _diagnose(v: GameView, s, pos, where) -> list[PlayDiagnostic]:
    if v.kind == "monad":
        # same plays as the body; joined levels cannot break (p6) that the body keeps
        return _diagnose(v.children["body"], s, pos, where)
    out = []
    ctx = f" in {where}" if where else ""
    seen = set()
    stack = []
    for idx, m in enumerate(s):
        mi = v.info[m]
        p = pos[idx]
        if idx == 0 and mi.polarity != O:
            out.append(PlayDiagnostic("p1", p, f"play starts with P-move {serialize(m)}{ctx}"))
        if idx > 0 and v.info[s[idx - 1]].polarity == mi.polarity:
            out.append(PlayDiagnostic("p2", p, f"two consecutive {mi.polarity}-moves{ctx}"))
        if m in seen:
            out.append(PlayDiagnostic("p3", p, f"move {serialize(m)} repeated{ctx}"))
        j = mi.justifier
        if j is not None:
            if j not in seen:
                out.append(PlayDiagnostic("p5", p, f"justifier {serialize(j)} of {serialize(m)} has not been played{ctx}"))
            elif mi.kind == A and (not stack or stack[-1] != j):
                out.append(PlayDiagnostic("p4", p, f"answer {serialize(m)} does not close the innermost pending question{ctx}"))
            if not v.lat.leq(mi.level, v.info[j].level):
                out.append(PlayDiagnostic(
                    "p6", p, f"level {mi.level} of {serialize(m)} is not ≤ level {v.info[j].level} of its justifier{ctx}"))
        if mi.kind == Q:
            stack.append(m)
        elif stack and stack[-1] == j:
            stack.pop()
        seen.add(m)
    kind = v.kind
    if kind in ("tensor", "with"):
        if kind == "with" and len({m[0] for m in s}) > 1:
            first = next(i for i, m in enumerate(s) if m[0] != s[0][0])
            out.append(PlayDiagnostic("restriction", pos[first], f"play visits both sides of a with{ctx}"))
        for side, name in (("L", "left"), ("R", "right")):
            idx = [i for i, m in enumerate(s) if m[0] == side]
            out += _diagnose(v.children[side], tuple(s[i][1] for i in idx), [pos[i] for i in idx],
                             _join(where, name))
    elif kind == "bang":
        for i in sorted({m[1] for m in s}):
            idx = [n for n, m in enumerate(s) if m[1] == i]
            out += _diagnose(v.children["body"], tuple(s[n][2] for n in idx), [pos[n] for n in idx],
                             _join(where, f"copy {i}"))
    elif kind == "limp":
        for part, name in (("A", "argument"), ("B", "result")):
            idx = [i for i, m in enumerate(s) if m[0] == part]
            out += _diagnose(v.children[part], tuple(s[i][-1] for i in idx), [pos[i] for i in idx],
                             _join(where, name))
    return out


def _join(where, name):
    return f"{where}/{name}" if where else name


# ------------------------------------------------------------ equivalence

def play_equiv(v: GameView, s, u) -> bool:
    """Decide s ≈ u structurally, one constructor at a time."""
    s, u = tuple(s), tuple(u)
    if len(s) != len(u):
        return False
    if [v.info[m][:2] for m in s] != [v.info[m][:2] for m in u]:
        return False
    kind = v.kind
    if kind == "flat":
        return s == u
    if kind == "unit":
        return True
    if kind == "monad":
        return play_equiv(v.children["body"], s, u)
    if kind in ("tensor", "with"):
        if [m[0] for m in s] != [m[0] for m in u]:
            return False
        return all(play_equiv(v.children[x], restrict(v, s, x), restrict(v, u, x)) for x in ("L", "R"))
    if kind == "bang":
        # the permutation is forced position by position; other indices are irrelevant
        pi, inv = {}, {}
        for m, n in zip(s, u):
            i, j = m[1], n[1]
            if pi.setdefault(i, j) != j or inv.setdefault(j, i) != i:
                return False
        return all(play_equiv(v.children["body"], restrict(v, s, i), restrict(v, u, j)) for i, j in pi.items())
    # limp: initial codomain moves correspond by position in the codomain restriction
    if [m[0] for m in s] != [m[0] for m in u]:
        return False
    sb, ub = restrict(v, s, "B"), restrict(v, u, "B")
    if not play_equiv(v.children["B"], sb, ub):
        return False
    corr = dict(zip(sb, ub))
    tags = {}
    for m, n in zip(s, u):
        if m[0] == "A":
            if m[1] not in corr or corr[m[1]] != n[1]:
                return False
            tags[m[1]] = n[1]
    return all(play_equiv(v.children["A"], restrict(v, s, b), restrict(v, u, c)) for b, c in tags.items())


def canon(v: GameView, s) -> tuple:
    """A representative of the ≈-class of ``s``: equal iff equivalent."""
    s = tuple(s)
    kind = v.kind
    if kind in ("flat", "unit"):
        return s
    if kind == "monad":
        return canon(v.children["body"], s)
    if kind in ("tensor", "with"):
        parts = {x: iter(canon(v.children[x], restrict(v, s, x))) for x in ("L", "R")}
        return tuple((m[0], next(parts[m[0]])) for m in s)
    if kind == "bang":
        rank = {}
        for m in s:
            rank.setdefault(m[1], len(rank))
        threads = {i: iter(canon(v.children["body"], restrict(v, s, i))) for i in rank}
        return tuple(("!", rank[m[1]], next(threads[m[1]])) for m in s)
    sb = restrict(v, s, "B")
    cb = canon(v.children["B"], sb)
    corr = dict(zip(sb, cb))
    itb = iter(cb)
    threads = {}
    out = []
    for m in s:
        if m[0] == "B":
            out.append(("B", next(itb)))
        else:
            b = m[1]
            if b not in threads:
                threads[b] = iter(canon(v.children["A"], restrict(v, s, b)))
            out.append(("A", corr.get(b, b), next(threads[b])))
    return tuple(out)


# ------------------------------------------------------------ enumeration

def budget_ms() -> float | None:
    raw = os.environ.get("GAMESEC_BUDGET_MS")
    return float(raw) if raw else None


class Budget:
    """Caps enumeration work by item count and optionally wall time."""

    def __init__(self, max_items: int | None = 2_000_000, ms: float | None = None, what="enumeration"):
        self.max_items = max_items
        self.ms = budget_ms() if ms is None else ms
        self.start = time.monotonic()
        self.count = 0
        self.what = what

    def check_time(self):
        if self.ms is not None and (time.monotonic() - self.start) * 1000 > self.ms:
            raise BudgetError(f"{self.what} exceeded GAMESEC_BUDGET_MS={self.ms:g}")

    def tick(self, n=1):
        self.count += n
        if self.max_items is not None and self.count > self.max_items:
            raise BudgetError(f"{self.what} exceeded {self.max_items} items")
        if self.ms is not None and self.count % 256 == 0:
            if (time.monotonic() - self.start) * 1000 > self.ms:
                raise BudgetError(f"{self.what} exceeded GAMESEC_BUDGET_MS={self.ms:g}")


def enumerate_plays(v: GameView, max_len: int, budget: Budget | None = None) -> list:
    """All plays of length ≤ max_len over the bounded move set, shortest first."""
    budget = budget or Budget(what="play enumeration")
    out = [()]
    frontier = deque([()])
    while frontier:
        s = frontier.popleft()
        if len(s) >= max_len:
            continue
        for m in extensions(v, s):
            t = s + (m,)
            budget.tick()
            out.append(t)
            frontier.append(t)
    return out
