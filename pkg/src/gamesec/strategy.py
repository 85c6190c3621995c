"""Strategies as ≈-saturated play sets, skeletons, and the categorical
structure on them (copy-cat, composition, tensor, pairing, currying, the !
comonad, level-monad units and coercions).

Every play set is finite: a strategy records the copy bound ``k`` of its game
and the play-length bound ``max_len`` up to which it is exact.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable

from .errors import BudgetError, GameMismatchError, ProtectionError, StrategyError
from .games import (
    Budget, GameView, canon, extension_ok, extensions, is_play, move_key,
    play_key, serialize, serialize_play, validate_play, view,
)
from .lattice import SecurityLattice
from .types import Bang, GameType, Limp, Monad, Tensor, With, erase_type, same_game, to_text


def full_length(v: GameView) -> int:
    # linearity: no play is longer than the bounded move set
    return len(v.moves)


def _sorted(plays):
    return sorted(plays, key=lambda s: (len(s), play_key(s)))


@dataclass(frozen=True)
class Strategy:
    game: GameType
    lat: SecurityLattice
    k: int
    max_len: int
    plays: frozenset
    truncated: bool = False

    @cached_property
    def view(self) -> GameView:
        return view(self.game, self.lat, self.k)

    @cached_property
    def children(self) -> dict:
        """prefix -> set of next moves, over plays and their odd prefixes."""
        out: dict = {}
        for s in self.plays:
            for i in range(len(s)):
                out.setdefault(s[:i], set()).add(s[i])
        return out

    def at(self, max_len: int) -> "Strategy":
        max_len = min(max_len, self.max_len)
        return Strategy(self.game, self.lat, self.k, max_len,
                        frozenset(s for s in self.plays if len(s) <= max_len), self.truncated)

    def with_game(self, game: GameType) -> "Strategy":
        """The same play set read in another game; every play is re-validated."""
        v = view(game, self.lat, self.k)
        for s in _sorted(self.plays):
            diags = validate_play(v, s)
            if diags:
                raise StrategyError(f"play invalid in {to_text(game)}: {diags[0].reason}", [s])
        return Strategy(game, self.lat, self.k, self.max_len, self.plays, self.truncated)

    def sorted_plays(self):
        return _sorted(self.plays)

    def as_dict(self):
        return {"game": to_text(self.game), "copy_bound": self.k, "max_len": self.max_len,
                "truncated": self.truncated,
                "plays": [serialize_play(s) for s in self.sorted_plays()]}

    @property
    def complete(self) -> bool:
        """True when the bound covers every play of the bounded game."""
        return self.max_len >= full_length(self.view)

    def __len__(self):
        return len(self.plays)


Skeleton = Strategy  # same representation; the laws differ


@dataclass
class Verdict:
    ok: bool
    law: str
    witnesses: list = field(default_factory=list)
    detail: str = ""
    bounds: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def as_dict(self):
        out = {"law": self.law, "verdict": "pass" if self.ok else "fail", "bounds": self.bounds}
        if self.detail:
            out["detail"] = self.detail
        if self.witnesses:
            out["witness"] = [serialize_play(w) for w in self.witnesses]
        return out


def same_plays(s1: Strategy, s2: Strategy, max_len: int | None = None) -> bool:
    n = min(s1.max_len, s2.max_len) if max_len is None else max_len
    return {s for s in s1.plays if len(s) <= n} == {s for s in s2.plays if len(s) <= n}


def _bounds(lat, t, k, max_len):
    v = view(t, lat, k)
    return v, full_length(v) if max_len is None else max_len


# ------------------------------------------------------------- generic growth

def grow(v: GameView, max_len: int, accept: Callable, budget: Budget | None = None) -> frozenset:
    """Least set of even plays containing ε, closed under accepted O/P steps."""
    budget = budget or Budget(what="strategy growth")
    out = {()}
    frontier = [()]
    while frontier:
        nxt = []
        for s in frontier:
            if len(s) + 2 > max_len:
                continue
            for a in extensions(v, s):
                sa = s + (a,)
                for b in extensions(v, sa):
                    budget.tick()
                    sab = sa + (b,)
                    if accept(sab):
                        out.add(sab)
                        nxt.append(sab)
        frontier = nxt
    return frozenset(out)


def equivalents(v: GameView, s) -> list:
    """Every play t of the bounded game with t ≈ s."""
    target = canon(v, s)
    out = []

    def go(t):
        if len(t) == len(s):
            out.append(t)
            return
        for m in extensions(v, t):
            u = t + (m,)
            if canon(v, u) == target[:len(u)] or canon(v, u) == canon(v, s[:len(u)]):
                go(u)

    go(())
    return out


# ------------------------------------------------------------ law checkers

def is_strategy(t: GameType, lat: SecurityLattice, k: int, plays: Iterable, max_len: int | None = None) -> Verdict:
    v, max_len = _bounds(lat, t, k, max_len)
    plays = set(plays)
    bounds = {"copy_bound": k, "max_len": max_len}
    if () not in plays:
        return Verdict(False, "causal consistency", [], "ε missing (strategies are non-empty)", bounds)
    for s in _sorted(plays):
        if len(s) % 2:
            return Verdict(False, "even length", [s], "odd-length play", bounds)
        if len(s) > max_len:
            return Verdict(False, "bounds", [s], "play longer than max_len", bounds)
        if not is_play(v, s):
            return Verdict(False, "validity", [s], validate_play(v, s)[0].reason, bounds)
        if s and s[:-2] not in plays:
            return Verdict(False, "causal consistency", [s], "prefix missing", bounds)
    keys = {canon(v, s) for s in plays}
    for s in _sorted(plays):
        for t in equivalents(v, s):
            if t not in plays:
                return Verdict(False, "representation independence", [s, t], "≈-equivalent play missing", bounds)
    by_pos: dict = {}
    for s in _sorted(plays):
        if s:
            by_pos.setdefault(canon(v, s[:-1]), []).append(s)
    for group in by_pos.values():
        if len({canon(v, s) for s in group}) > 1:
            a, b = group[0], next(x for x in group if canon(v, x) != canon(v, group[0]))
            return Verdict(False, "determinacy", [a, b], "equivalent positions answered inequivalently", bounds)
    del keys
    return Verdict(True, "strategy", [], "", bounds)


def is_skeleton(t: GameType, lat: SecurityLattice, k: int, plays: Iterable, max_len: int | None = None) -> Verdict:
    v, max_len = _bounds(lat, t, k, max_len)
    phi = set(plays)
    bounds = {"copy_bound": k, "max_len": max_len}
    if () not in phi:
        return Verdict(False, "non-empty", [], "ε missing", bounds)
    for s in _sorted(phi):
        if len(s) % 2 or not is_play(v, s):
            return Verdict(False, "validity", [s], "odd or invalid play", bounds)
        if s and s[:-2] not in phi:
            return Verdict(False, "causal consistency", [s], "prefix missing", bounds)
    responses: dict = {}
    for s in _sorted(phi):
        if s:
            responses.setdefault(s[:-1], []).append(s)
    for group in responses.values():
        if len(group) > 1:
            return Verdict(False, "functional determinacy", group[:2], "two responses at one position", bounds)
    by_len: dict = {}
    for s in phi:
        by_len.setdefault(len(s), []).append(s)
    for sab in _sorted(phi):
        if not sab:
            continue
        key_sa = canon(v, sab[:-1])
        key_sab = canon(v, sab)
        for t in _sorted(by_len.get(len(sab) - 2, [])):
            for a2 in extensions(v, t):
                ta = t + (a2,)
                if canon(v, ta) != key_sa:
                    continue
                matches = [u for u in responses.get(ta, []) if canon(v, u) == key_sab]
                if len(matches) != 1:
                    return Verdict(False, "functional representation independence", [sab, ta],
                                   "equivalent position lacks a unique equivalent response", bounds)
    return Verdict(True, "skeleton", [], "", bounds)


def is_skeleton_of(phi: Strategy, sigma: Strategy) -> Verdict:
    bounds = {"copy_bound": sigma.k, "max_len": sigma.max_len}
    if not phi.plays <= sigma.plays:
        extra = _sorted(phi.plays - sigma.plays)
        return Verdict(False, "subset", extra[:1], "skeleton play outside the strategy", bounds)
    if () not in phi.plays:
        return Verdict(False, "non-empty", [], "ε missing", bounds)
    for s in phi.sorted_plays():
        if s and s[:-2] not in phi.plays:
            return Verdict(False, "causal consistency", [s], "prefix missing", bounds)
    for sab in sigma.sorted_plays():
        if sab and sab[:-2] in phi.plays:
            n = len(phi.children.get(sab[:-1], ()))
            if n != 1:
                return Verdict(False, "uniformization", [sab], f"{n} responses in the skeleton", bounds)
    return Verdict(True, "skeleton of", [], "", bounds)


# ------------------------------------------------------- saturation & skeletons

def saturate(phi: Strategy, check: bool = False) -> Strategy:
    """φ• : every bounded play equivalent to some play of φ."""
    v = phi.view
    if check:
        verdict = is_skeleton(phi.game, phi.lat, phi.k, phi.plays, phi.max_len)
        if not verdict:
            raise StrategyError(f"not a skeleton: {verdict.law}", verdict.witnesses)
    keys = {canon(v, s) for s in phi.plays}
    plays = grow(v, phi.max_len, lambda s: canon(v, s) in keys)
    return Strategy(phi.game, phi.lat, phi.k, phi.max_len, plays, phi.truncated)


def least_choice(s, a, candidates):
    return min(candidates, key=move_key)


def greatest_choice(s, a, candidates):
    return max(candidates, key=move_key)


def guided_choice(target):
    """Tie-break that steers extraction through the play ``target``."""
    def choose(s, a, candidates):
        n = len(s) + 1
        if target[:n] == s + (a,) and len(target) > n and target[n] in candidates:
            return target[n]
        return min(candidates, key=move_key)
    return choose


def extract_skeleton(sigma: Strategy, choose=least_choice) -> Strategy:
    """Pick one response per reachable position (least serialized tag by default)."""
    phi = {()}
    frontier = [()]
    kids = sigma.children
    while frontier:
        nxt = []
        for s in frontier:
            for a in sorted(kids.get(s, ()), key=move_key):
                sa = s + (a,)
                cands = kids.get(sa)
                if not cands:
                    continue
                sab = sa + (choose(s, a, cands),)
                phi.add(sab)
                nxt.append(sab)
        frontier = nxt
    return Strategy(sigma.game, sigma.lat, sigma.k, sigma.max_len, frozenset(phi), sigma.truncated)


def skeleton_preorder(phi: Strategy, psi: Strategy, method: str = "saturation") -> bool:
    if not same_game(phi.game, psi.game, phi.lat):
        raise GameMismatchError("skeletons live on different games")
    if method == "saturation":
        return saturate(phi).plays <= saturate(psi).plays
    v = phi.view
    by_len: dict = {}
    for t in psi.plays:
        by_len.setdefault(len(t), []).append(t)
    for sab in phi.plays:
        if not sab:
            continue
        key_sa, key_sab = canon(v, sab[:-1]), canon(v, sab)
        for t in by_len.get(len(sab) - 2, []):
            for a2 in extensions(v, t):
                ta = t + (a2,)
                if canon(v, ta) != key_sa:
                    continue
                if not any(canon(v, ta + (b,)) == key_sab for b in psi.children.get(ta, ())):
                    return False
    return True


def make_strategy(t: GameType, lat: SecurityLattice, k: int, plays, max_len: int | None = None,
                  saturated: bool = False) -> Strategy:
    """Build a strategy from literal plays, saturating a skeleton if asked."""
    v, max_len = _bounds(lat, t, k, max_len)
    plays = frozenset(tuple(s) for s in plays)
    for s in _sorted(plays):
        diags = validate_play(v, s)
        if diags:
            raise StrategyError(f"invalid play: {diags[0].reason}", [s])
    st = Strategy(t, lat, k, max_len, plays)
    return st if saturated else saturate(st)


def from_literal(t, lat, k, plays: list[list[str]], max_len=None) -> Strategy:
    """Strategy from fixture data: plays as lists of serialized move tags."""
    from .games import parse_sexp
    return make_strategy(t, lat, k, [tuple(parse_sexp(m) for m in s) for s in plays], max_len)


# ------------------------------------------------------- copy-cat family

def threaded_copycat(game: GameType, lat: SecurityLattice, k: int, max_len: int | None,
                     dom: Callable, cod: Callable, views: dict) -> Strategy:
    """Copy-cat on ``game = D -o C`` along a correspondence of threads.

    ``dom``/``cod`` map a move of the respective side to (thread, component,
    inner move), or None when the move may never be played.  Each P-move must
    copy the preceding O-move into the other side; paired threads must carry
    the same component and ≈-equivalent inner plays (≈ taken in
    ``views[component]``), and justifiers are copied along the pairing.
    """
    v, max_len = _bounds(lat, game, k, max_len)

    def split(m):
        return dom(m[2]) if m[0] == "A" else cod(m[1])

    def accept(s):
        fwd, bwd, partner, inner = {}, {}, {}, {}
        for i in range(0, len(s), 2):
            x, y = s[i], s[i + 1]
            if x[0] == y[0]:
                return False
            d, c = (x, y) if x[0] == "A" else (y, x)
            sd, sc = split(d), split(c)
            if sd is None or sc is None or sd[1] != sc[1]:
                return False
            td, tc = (sd[0], sd[1]), (sc[0], sc[1])
            if fwd.setdefault(td, tc) != tc or bwd.setdefault(tc, td) != td:
                return False
            jx, jy = v.info[x].justifier, v.info[y].justifier
            if jx is None:
                if jy != x:
                    return False
            elif jy is None:
                if jx != y:
                    return False
            elif partner.get(jx) != jy:
                return False
            partner[x], partner[y] = y, x
            pair = inner.setdefault(tc, ([], []))
            pair[0].append(sd[2])
            pair[1].append(sc[2])
        for (tk, comp), (ds, cs) in inner.items():
            cv = views[comp]
            if canon(cv, tuple(ds)) != canon(cv, tuple(cs)):
                return False
        return True

    return Strategy(game, lat, k, max_len, grow(v, max_len, accept))


def copycat(t: GameType, lat: SecurityLattice, k: int = 2, max_len: int | None = None) -> Strategy:
    """id_A on A -o A."""
    one = lambda m: ((), 0, m)
    return threaded_copycat(Limp(t, t), lat, k, max_len, one, one, {0: view(t, lat, k)})


def unit_eta(level: str, t: GameType, lat: SecurityLattice, k: int = 2, max_len: int | None = None) -> Strategy:
    """η : A -> [l]A, the copy-cat read in the new game."""
    lat.check(level)
    one = lambda m: ((), 0, m)
    return threaded_copycat(Limp(t, Monad(level, t)), lat, k, max_len, one, one, {0: view(t, lat, k)})


def coerce(l1: str, l2: str, t: GameType, lat: SecurityLattice, k: int = 2, max_len: int | None = None) -> Strategy:
    """ι : [l1]A -> [l2]A for l1 ≤ l2; refused with a (p6) witness otherwise."""
    game = Limp(Monad(l1, t), Monad(l2, t))
    if not lat.leq(l1, l2):
        v = view(game, lat, k)
        cc = copycat(t, lat, k, max_len)
        for s in cc.sorted_plays():
            diags = [d for d in validate_play(v, s) if d.condition == "p6"]
            if diags:
                raise ProtectionError(
                    f"cannot coerce [{l1}] to [{l2}]: {l1} ≰ {l2}; {diags[0].reason}",
                    required=l1, found=l2, witness=s[:diags[0].position + 1])
        raise ProtectionError(f"cannot coerce [{l1}] to [{l2}]: {l1} ≰ {l2}", required=l1, found=l2)
    one = lambda m: ((), 0, m)
    return threaded_copycat(game, lat, k, max_len, one, one, {0: view(t, lat, k)})


def counit(t: GameType, lat: SecurityLattice, k: int = 2, max_len: int | None = None) -> Strategy:
    """ε : !A -> A, copy-cat between A and a single index of !A."""
    def dom(m):
        return (m[1],), 0, m[2]
    return threaded_copycat(Limp(Bang(t), t), lat, k, max_len, dom, lambda m: ((), 0, m),
                            {0: view(t, lat, k)})


def cantor_pair(i: int, j: int, k: int | None = None) -> int:
    n = (i + j) * (i + j + 1) // 2 + j
    if k is not None and n >= k:
        raise BudgetError(f"pairing index p({i},{j}) = {n} exceeds copy bound {k}")
    return n


def comultiplication(t: GameType, lat: SecurityLattice, k: int = 2, max_len: int | None = None) -> Strategy:
    """δ : !A -> !!A.

    Copies each thread (i, j) of !!A to its own thread of !A.  This is the
    saturation of the Cantor-pairing skeleton: at a finite copy bound the
    paired index p(i, j) may not fit, but the ≈-class does.
    """
    def dom(m):
        return (m[1],), 0, m[2]

    def cod(m):
        return (m[1], m[2][1]), 0, m[2][2]
    return threaded_copycat(Limp(Bang(t), Bang(Bang(t))), lat, k, max_len, dom, cod, {0: view(t, lat, k)})


def cantor_delta_skeleton(t: GameType, lat: SecurityLattice, k: int, max_len: int | None = None) -> Strategy:
    """The literal δ skeleton: thread (i, j) of !!A goes to index p(i, j) of !A.

    Only threads opened in first-occurrence order are answered.  That keeps
    every needed p(i, j) small, and the saturation is δ.  BudgetError if a
    needed p(i, j) does not fit in ``k``.
    """
    game = Limp(Bang(t), Bang(Bang(t)))
    v, max_len = _bounds(lat, game, k, max_len)

    def accept(s):
        outer_seen, inner_seen = [], {}
        for m in s:
            if m[0] == "B":
                i, j = m[1][1], m[1][2][1]
                if i not in outer_seen:
                    if i != len(outer_seen):
                        return False
                    outer_seen.append(i)
                seen = inner_seen.setdefault(i, [])
                if j not in seen:
                    if j != len(seen):
                        return False
                    seen.append(j)
        for x, y in zip(s[::2], s[1::2]):
            if x[0] == "B":
                i, j, inner_m = x[1][1], x[1][2][1], x[1][2][2]
                if y[0] != "A" or y[2][1] != cantor_pair(i, j, k) or y[2][2] != inner_m:
                    return False
            else:
                n, inner_m = x[2][1], x[2][2]
                if y[0] != "B" or cantor_pair(y[1][1], y[1][2][1], k) != n or y[1][2][2] != inner_m:
                    return False
        return True

    return Strategy(game, lat, k, max_len, grow(v, max_len, accept))


def projection(left: GameType, right: GameType, side: str, lat: SecurityLattice, k: int = 2,
               max_len: int | None = None) -> Strategy:
    """π : A & B -> A (side 'L') or -> B (side 'R')."""
    target = left if side == "L" else right

    def dom(m):
        return ((), 0, m[1]) if m[0] == side else None
    return threaded_copycat(Limp(With(left, right), target), lat, k, max_len, dom,
                            lambda m: ((), 0, m), {0: view(target, lat, k)})


def exp_iso(a: GameType, b: GameType, lat: SecurityLattice, k: int = 2, max_len: int | None = None,
            inverse: bool = False) -> Strategy:
    """!(A & B) -> !A ⊗ !B, or its inverse."""
    bang_with = Bang(With(a, b))
    tensor = Tensor(Bang(a), Bang(b))

    def from_bang_with(m):
        return (m[1],), m[2][0], m[2][1]

    def from_tensor(m):
        return (m[0], m[1][1]), m[0], m[1][2]
    views = {"L": view(a, lat, k), "R": view(b, lat, k)}
    if inverse:
        return threaded_copycat(Limp(tensor, bang_with), lat, k, max_len, from_tensor, from_bang_with, views)
    return threaded_copycat(Limp(bang_with, tensor), lat, k, max_len, from_bang_with, from_tensor, views)


def monad_map(level: str, sigma: Strategy) -> Strategy:
    """[l]σ is σ itself, read on [l]A -o [l]B."""
    a, b = _split_limp(sigma.game)
    return sigma.with_game(Limp(Monad(level, a), Monad(level, b)))


def _split_limp(t: GameType):
    if isinstance(t, Monad):
        a, b = _split_limp(t.body)
        return Monad(t.level, a), Monad(t.level, b)
    if not isinstance(t, Limp):
        raise GameMismatchError(f"expected a morphism game A -o B, got {to_text(t)}")
    return t.dom, t.cod


# ------------------------------------------------------------- composition

def compose(sigma: Strategy, tau: Strategy, max_len: int | None = None) -> Strategy:
    """σ;τ by parallel interaction and hiding of the middle game.

    The result is exact up to the returned ``max_len``; when the inputs'
    bounds cut an interaction short the bound drops below the request and
    ``truncated`` is set.
    """
    lat = sigma.lat
    if sigma.k != tau.k:
        raise GameMismatchError("strategies use different copy bounds")
    a, b = _split_limp(sigma.game)
    b2, c = _split_limp(tau.game)
    if not same_game(b, b2, lat):
        raise GameMismatchError(f"middle games differ: {to_text(b)} vs {to_text(b2)}")
    k = sigma.k
    game = Limp(a, c)
    out_view = view(game, lat, k)
    if max_len is not None:
        want = max_len
    elif sigma.complete and tau.complete:
        want = full_length(out_view)
    else:
        want = max(sigma.max_len, tau.max_len)
    vb = view(b, lat, k)
    skids, tkids = sigma.children, tau.children
    result = {()}
    exact = [want]

    def cut(ext_len):
        exact[0] = min(exact[0], ext_len)

    # stack of (ab, bc, ext, cmap); cmap: B move -> tag c of its copy in B -o C
    stack = [((), (), (), {})]
    budget = Budget(what="composition")
    while stack:
        ab, bc, ext, cmap = stack.pop()
        budget.tick()
        if len(ab) % 2 == 0 and len(bc) % 2 == 0:
            if len(ext) % 2 == 0:
                if len(ext) <= want:
                    result.add(ext)
            if len(ext) + 2 > want:
                continue
            # O moves in A, answered by σ
            if len(ab) + 2 > sigma.max_len and not sigma.complete:
                cut(len(ext))
            for m in skids.get(ab, ()):
                if m[0] == "A" and m[1] in cmap:
                    stack.append((ab + (m,), bc, ext + (("A", cmap[m[1]], m[2]),), cmap))
            # O moves in C, answered by τ
            if len(bc) + 2 > tau.max_len and not tau.complete:
                cut(len(ext))
            for m in tkids.get(bc, ()):
                if m[0] == "B":
                    stack.append((ab, bc + (m,), ext + (m,), cmap))
        elif len(ab) % 2 == 1:
            nxt = skids.get(ab, ())
            if not nxt and len(ab) + 1 > sigma.max_len and not sigma.complete:
                cut(len(ext))
            for m in nxt:
                if m[0] == "A":
                    stack.append((ab + (m,), bc, ext + (("A", cmap[m[1]], m[2]),), cmap))
                else:
                    bm = m[1]
                    c_tag = cmap[_root(vb, bm)]
                    cm = dict(cmap)
                    cm[bm] = c_tag
                    stack.append((ab + (m,), bc + (("A", c_tag, bm),), ext, cm))
        else:
            nxt = tkids.get(bc, ())
            if not nxt and len(bc) + 1 > tau.max_len and not tau.complete:
                cut(len(ext))
            for m in nxt:
                if m[0] == "B":
                    stack.append((ab, bc + (m,), ext + (m,), cmap))
                else:
                    cm = dict(cmap)
                    cm[m[2]] = m[1]
                    stack.append((ab + (("B", m[2]),), bc + (m,), ext, cm))
    bound = want if exact[0] >= want else exact[0] - exact[0] % 2
    plays = frozenset(s for s in result if len(s) <= bound)
    for s in _sorted(plays):
        if not is_play(out_view, s):
            raise StrategyError("composition produced an invalid play", [s])
    return Strategy(game, lat, k, bound, plays, bound < want or sigma.truncated or tau.truncated)


def _root(vb: GameView, m):
    while vb.info[m].justifier is not None:
        m = vb.info[m].justifier
    return m


def interactions(sigma: Strategy, tau: Strategy, limit: int = 200) -> list[dict]:
    """σ∥τ traces before hiding, for display."""
    traces = []
    a, b = _split_limp(sigma.game)
    vb = view(b, sigma.lat, sigma.k)
    stack = [((), (), (), {}, ())]
    while stack and len(traces) < limit:
        ab, bc, ext, cmap, trace = stack.pop()
        extended = False
        if len(ab) % 2 == 0 and len(bc) % 2 == 0:
            for m in sigma.children.get(ab, ()):
                if m[0] == "A" and m[1] in cmap and len(ab) + 2 <= sigma.max_len:
                    mv = ("A", cmap[m[1]], m[2])
                    stack.append((ab + (m,), bc, ext + (mv,), cmap, trace + (("O", "A", mv),)))
                    extended = True
            for m in tau.children.get(bc, ()):
                if m[0] == "B":
                    stack.append((ab, bc + (m,), ext + (m,), cmap, trace + (("O", "C", m),)))
                    extended = True
        elif len(ab) % 2 == 1:
            for m in sigma.children.get(ab, ()):
                extended = True
                if m[0] == "A":
                    mv = ("A", cmap[m[1]], m[2])
                    stack.append((ab + (m,), bc, ext + (mv,), cmap, trace + (("P", "A", mv),)))
                else:
                    c_tag = cmap[_root(vb, m[1])]
                    cm = dict(cmap) | {m[1]: c_tag}
                    stack.append((ab + (m,), bc + (("A", c_tag, m[1]),), ext, cm,
                                  trace + (("σ", "B", m[1]),)))
        else:
            for m in tau.children.get(bc, ()):
                extended = True
                if m[0] == "B":
                    stack.append((ab, bc + (m,), ext + (m,), cmap, trace + (("P", "C", m),)))
                else:
                    cm = dict(cmap) | {m[2]: m[1]}
                    stack.append((ab + (("B", m[2]),), bc + (m,), ext, cm, trace + (("τ", "B", m[2]),)))
        if not extended and trace:
            traces.append({"interaction": [[who, comp, serialize(m)] for who, comp, m in trace],
                           "external": serialize_play(ext)})
    traces.sort(key=lambda d: (len(d["interaction"]), str(d["interaction"])))
    return traces


# ------------------------------------------------------ tensor, pairing, currying

def _image(plays, f):
    return frozenset(tuple(f(m) for m in s) for s in plays)


def tensor_strategy(sigma: Strategy, tau: Strategy) -> Strategy:
    """σ ⊗ τ : A ⊗ C -> B ⊗ D."""
    a, b = _split_limp(sigma.game)
    c, d = _split_limp(tau.game)
    game = Limp(Tensor(a, c), Tensor(b, d))
    lat, k = sigma.lat, sigma.k
    max_len = sigma.max_len + tau.max_len
    v = view(game, lat, k)

    def part(s, side):
        out = []
        for m in s:
            if m[0] == "A":
                if m[1][0] != m[2][0]:
                    return None
                if m[1][0] == side:
                    out.append(("A", m[1][1], m[2][1]))
            elif m[1][0] == side:
                out.append(("B", m[1][1]))
        return tuple(out)

    def accept(s):
        l, r = part(s, "L"), part(s, "R")
        return l is not None and l in sigma.plays and r in tau.plays

    return Strategy(game, lat, k, max_len, grow(v, max_len, accept), sigma.truncated or tau.truncated)


def pair_with(sigma: Strategy, tau: Strategy) -> Strategy:
    """⟨σ, τ⟩ : C -> A & B."""
    c, a = _split_limp(sigma.game)
    c2, b = _split_limp(tau.game)
    if not same_game(c, c2, sigma.lat):
        raise GameMismatchError("pairing needs a common domain")
    game = Limp(c, With(a, b))

    def tag(side):
        def f(m):
            return ("A", (side, m[1]), m[2]) if m[0] == "A" else ("B", (side, m[1]))
        return f
    plays = _image(sigma.plays, tag("L")) | _image(tau.plays, tag("R"))
    return Strategy(game, sigma.lat, sigma.k, min(sigma.max_len, tau.max_len),
                    frozenset(s for s in plays if len(s) <= min(sigma.max_len, tau.max_len)),
                    sigma.truncated or tau.truncated).with_game(game)


def curry(sigma: Strategy) -> Strategy:
    """Λ : (A ⊗ B) -o C  ≅  A -o (B -o C), a re-tagging of moves."""
    ab, c = _split_limp(sigma.game)
    if not isinstance(ab, Tensor):
        raise GameMismatchError("curry needs a game (A * B) -o C")

    def f(m):
        if m[0] == "B":
            return ("B", ("B", m[1]))
        side, inner = m[2]
        return ("A", ("B", m[1]), inner) if side == "L" else ("B", ("A", m[1], inner))
    game = Limp(ab.left, Limp(ab.right, c))
    return Strategy(game, sigma.lat, sigma.k, sigma.max_len, _image(sigma.plays, f), sigma.truncated).with_game(game)


def uncurry(sigma: Strategy) -> Strategy:
    a, bc = _split_limp(sigma.game)
    if not isinstance(bc, Limp):
        raise GameMismatchError("uncurry needs a game A -o (B -o C)")

    def f(m):
        if m[0] == "A":
            return ("A", m[1][1], ("L", m[2]))
        inner = m[1]
        if inner[0] == "A":
            return ("A", inner[1], ("R", inner[2]))
        return ("B", inner[1])
    game = Limp(Tensor(a, bc.dom), bc.cod)
    return Strategy(game, sigma.lat, sigma.k, sigma.max_len, _image(sigma.plays, f), sigma.truncated).with_game(game)


# -------------------------------------------------------- the ! comonad

def bang_functor(sigma: Strategy) -> Strategy:
    """!σ : !A -> !B, σ played independently in every index."""
    a, b = _split_limp(sigma.game)
    game = Limp(Bang(a), Bang(b))
    lat, k = sigma.lat, sigma.k
    v = view(game, lat, k)
    max_len = full_length(v) if sigma.max_len >= full_length(sigma.view) else sigma.max_len

    def accept(s):
        threads: dict = {}
        pairing, back = {}, {}
        for m in s:
            if m[0] == "B":
                j = m[1][1]
                threads.setdefault(j, []).append(("B", m[1][2]))
            else:
                j, i = m[1][1], m[2][1]
                if pairing.setdefault(j, i) != i or back.setdefault(i, j) != j:
                    return False
                threads.setdefault(j, []).append(("A", m[1][2], m[2][2]))
        return all(tuple(t) in sigma.plays for t in threads.values())

    return Strategy(game, lat, k, max_len, grow(v, max_len, accept), sigma.truncated)


def promote(sigma: Strategy, max_len: int | None = None) -> Strategy:
    """σ† = δ ; !σ : !A -> !B for σ : !A -> B."""
    bang_a, b = _split_limp(sigma.game)
    if not isinstance(bang_a, Bang):
        raise GameMismatchError("promotion needs σ : !A -> B")
    delta = comultiplication(bang_a.body, sigma.lat, sigma.k)
    return compose(delta, bang_functor(sigma), max_len)


def kleisli(sigma: Strategy, tau: Strategy, max_len: int | None = None) -> Strategy:
    return compose(promote(sigma), tau, max_len)


# ------------------------------------------------------ naturality, totality, erasure

def naturality_check(component: Strategy, sigma: Strategy, l1: str, l2: str) -> Verdict:
    """Does [l1]σ ; τ = τ ; [l2]σ hold for this component τ?"""
    left = compose(monad_map(l1, sigma), component)
    right = compose(component, monad_map(l2, sigma))
    n = min(left.max_len, right.max_len)
    bounds = {"copy_bound": sigma.k, "max_len": n}
    lp = {s for s in left.plays if len(s) <= n}
    rp = {s for s in right.plays if len(s) <= n}
    if lp == rp:
        return Verdict(True, "naturality", [], "", bounds)
    return Verdict(False, "naturality", _sorted(lp ^ rp)[:1], "square does not commute", bounds)


def is_total_bounded(sigma: Strategy, max_len: int | None = None) -> Verdict:
    L = sigma.max_len if max_len is None else min(max_len, sigma.max_len)
    v = sigma.view
    bounds = {"copy_bound": sigma.k, "max_len": L}
    for s in sigma.sorted_plays():
        if len(s) + 2 > L:
            continue
        for a in extensions(v, s):
            if not sigma.children.get(s + (a,)):
                return Verdict(False, "totality", [s + (a,)], "no response", bounds)
    return Verdict(True, "totality", [], "", bounds)


def restrict_to_erasure(sigma: Strategy, level: str) -> Strategy:
    """σ' : A^l -> B^l, the plays of σ that avoid every move at level ≥ l."""
    a, b = _split_limp(sigma.game)
    lat = sigma.lat
    game = Limp(erase_type(a, level, lat), erase_type(b, level, lat))
    v = view(game, lat, sigma.k)
    plays = frozenset(s for s in sigma.plays if all(m in v.info for m in s) and is_play(v, s))
    return Strategy(game, lat, sigma.k, sigma.max_len, plays, sigma.truncated)


# ----------------------------------------------------------- history-free

@dataclass(frozen=True)
class HistoryFreeGenerator:
    game: GameType
    f: dict  # O-move -> P-move


def from_generator(g: HistoryFreeGenerator, lat: SecurityLattice, k: int = 2,
                   max_len: int | None = None) -> Strategy:
    """The skeleton generated by responding f(a) to every O-move a."""
    v, max_len = _bounds(lat, g.game, k, max_len)
    phi = {()}
    frontier = [()]
    while frontier:
        nxt = []
        for s in frontier:
            if len(s) + 2 > max_len:
                continue
            for a in extensions(v, s):
                b = g.f.get(a)
                if b is None:
                    continue
                sab = s + (a, b)
                if b not in v.info or not extension_ok(v, s + (a,), b):
                    diags = validate_play(v, sab) if b in v.info else []
                    why = diags[0].reason if diags else f"{serialize(b)} is not a move"
                    raise StrategyError(f"generator response rejected: {why}", [sab])
                phi.add(sab)
                nxt.append(sab)
        frontier = nxt
    out = Strategy(g.game, lat, k, max_len, frozenset(phi))
    verdict = history_free_conditions(out)
    if not verdict:
        raise StrategyError(verdict.detail, verdict.witnesses)
    return out


def history_free_conditions(phi: Strategy) -> Verdict:
    v = phi.view
    resp: dict = {}
    bounds = {"copy_bound": phi.k, "max_len": phi.max_len}
    for s in phi.sorted_plays():
        if s:
            a, b = s[-2], s[-1]
            if resp.setdefault(a, b) != b:
                return Verdict(False, "history-free", [s], "O-move answered two ways", bounds)
    for s in phi.sorted_plays():
        if len(s) + 2 > phi.max_len:
            continue
        for a in extensions(v, s):
            if a in resp and extension_ok(v, s + (a,), resp[a]) and s + (a, resp[a]) not in phi.plays:
                return Verdict(False, "history-free", [s + (a, resp[a])], "response not propagated", bounds)
    return Verdict(True, "history-free", [], "", bounds)


# ------------------------------------------------------- enumeration oracle

def enumerate_skeletons(t: GameType, lat: SecurityLattice, k: int, max_len: int,
                        budget: Budget | None = None, maximal: bool = True):
    """Yield one skeleton per strategy at the bounds.

    At every reachable position each ≈-class of O-move receives one response
    class whenever some response exists.  With ``maximal=False`` leaving an
    O-move unanswered is also an option, so every strategy appears.
    """
    v = view(t, lat, k)
    budget = budget or Budget(max_items=200_000, what="strategy enumeration")

    def options(s):
        if len(s) + 2 > max_len:
            return []
        per_class = []
        seen = set()
        for a in extensions(v, s):
            sa = s + (a,)
            key = canon(v, sa)
            if key in seen:
                continue
            seen.add(key)
            resp, rkeys = [], set()
            for b in extensions(v, sa):
                rk = canon(v, sa + (b,))
                if rk not in rkeys:
                    rkeys.add(rk)
                    resp.append(sa + (b,))
            if not maximal:
                resp.append(None)
            if resp:
                per_class.append(resp)
        return per_class

    def go(pending, phi):
        budget.tick()
        if not pending:
            yield frozenset(phi)
            return
        s, rest = pending[0], pending[1:]
        for choice in itertools.product(*options(s)):
            chosen = [c for c in choice if c is not None]
            yield from go(rest + chosen, phi | set(chosen))

    for phi in go([()], {()}):
        yield Strategy(t, lat, k, max_len, phi)


def enumerate_strategies(t, lat, k, max_len, budget=None, maximal=True):
    for phi in enumerate_skeletons(t, lat, k, max_len, budget, maximal):
        yield saturate(phi)
