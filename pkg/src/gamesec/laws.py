"""Seeded corpora and the bounded law suites behind ``gamesec laws test``.

Every check produces a JSON-ready record ``{suite, law, objects, bounds,
verdict, witness?}``.  Records carry no timing data, so a report depends only
on the seed and the bounds.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from . import strategy as S
from .errors import BudgetError
from .flow import moves_in_component, no_flow, no_flow_oracle, rhd
from .games import Budget, enumerate_plays, serialize_play, validate_play, view
from .lattice import SecurityLattice, l4
from .types import Bang, Flat, GameType, I, Limp, Monad, Tensor, Unit, With, to_text

LEAVES = (("X", 1), ("X", 2), ("Y", 1))


def depth(t: GameType) -> int:
    if isinstance(t, (Flat, Unit)):
        return 0
    if isinstance(t, (Bang, Monad)):
        return 1 + depth(t.body)
    a, b = (t.dom, t.cod) if isinstance(t, Limp) else (t.left, t.right)
    return 1 + max(depth(a), depth(b))


def game_size(t: GameType, lat: SecurityLattice, k: int) -> int:
    return len(view(t, lat, k).moves)


def random_type(rng: random.Random, lat: SecurityLattice, d: int) -> GameType:
    if d == 0 or rng.random() < 0.3:
        if rng.random() < 0.08:
            return I
        name, arity = rng.choice(LEAVES)
        return Flat(name, arity, rng.choice(sorted(lat.elements)))
    op = rng.choice(["tensor", "limp", "with", "bang", "monad", "monad"])
    if op == "bang":
        return Bang(random_type(rng, lat, d - 1))
    if op == "monad":
        return Monad(rng.choice(sorted(lat.elements)), random_type(rng, lat, d - 1))
    a, b = random_type(rng, lat, d - 1), random_type(rng, lat, d - 1)
    return {"tensor": Tensor, "limp": Limp, "with": With}[op](a, b)


def type_corpus(seed: int, lat: SecurityLattice, n: int, k: int, max_moves: int, max_depth: int = 2,
                tries: int = 20000) -> list:
    """``n`` distinct object types with at most ``max_moves`` moves at copy bound k."""
    rng = random.Random(seed)
    seen, out = set(), []
    base = [Flat("X", 1, lat.bottom), Flat("X", 2, lat.bottom), I]
    for t in base + [random_type(rng, lat, max_depth) for _ in range(tries)]:
        key = to_text(t)
        if key in seen or game_size(t, lat, k) > max_moves:
            continue
        seen.add(key)
        out.append(t)
        if len(out) >= n:
            break
    return out


def morphism_corpus(seed: int, lat: SecurityLattice, n: int, k: int, max_moves: int) -> list:
    """``n`` games A -o B of depth ≤ 3 whose move sets fit in ``max_moves``."""
    objs = type_corpus(seed, lat, 40, k, max_moves // 2, max_depth=2)
    rng = random.Random(seed + 1)
    pairs = [(a, b) for a in objs for b in objs]
    rng.shuffle(pairs)
    out, seen = [], set()
    for a, b in pairs:
        g = Limp(a, b)
        if depth(g) > 3 or game_size(g, lat, k) > max_moves or isinstance(b, Unit):
            continue
        key = to_text(g)
        if key not in seen:
            seen.add(key)
            out.append((a, b))
        if len(out) >= n:
            break
    return out


@dataclass
class Session:
    seed: int = 7
    k: int = 2
    max_len: int = 8
    lat: SecurityLattice = field(default_factory=l4)
    n_games: int = 30
    max_moves: int = 8
    max_strategies: int = 40
    _cache: dict = field(default_factory=dict)
    deadline: Budget = field(default_factory=lambda: Budget(max_items=None, what="law suites"))

    @property
    def bounds(self):
        return {"copy_bound": self.k, "max_len": self.max_len}

    def strategies(self, game: GameType, k: int | None = None, max_len: int | None = None):
        """All strategies on ``game`` at the bounds, or None past the cap."""
        k = self.k if k is None else k
        max_len = self.max_len if max_len is None else max_len
        key = (to_text(game), k, max_len)
        self.deadline.check_time()
        if key not in self._cache:
            out = []
            try:
                # the cap counts items only, so which games are skipped never depends on timing
                budget = Budget(max_items=50_000, ms=float("inf"), what="strategy enumeration")
                for st in S.enumerate_strategies(game, self.lat, k, max_len, budget, maximal=False):
                    out.append(st)
                    if len(out) > self.max_strategies:
                        out = None
                        break
            except BudgetError:
                out = None
            self._cache[key] = sorted(out, key=_strategy_key) if out is not None else None
        return self._cache[key]


def _strategy_key(st):
    return [serialize_play(s) for s in st.sorted_plays()]


def record(suite, law, objects, bounds, ok, witness=None, detail=None):
    out = {"suite": suite, "law": law, "objects": objects, "bounds": bounds,
           "verdict": "pass" if ok is True else ("fail" if ok is False else ok)}
    if detail:
        out["detail"] = detail
    if witness is not None and ok is not True:
        out["witness"] = [serialize_play(s) for s in witness]
    return out


def _diff(p1, p2):
    d = sorted(set(p1) ^ set(p2), key=lambda s: (len(s), S.play_key(s)))
    return d[:1]


def _strategy_obj(st):
    return {"game": to_text(st.game), "plays": len(st.plays)}


# ----------------------------------------------------------------- suites

def suite_category(sess: Session) -> list:
    """Identity and associativity of composition, as exact play-set equalities."""
    out = []
    games = [(a, b) for a, b in morphism_corpus(sess.seed, sess.lat, 4 * sess.n_games, sess.k, sess.max_moves)
             if sess.strategies(Limp(a, b)) is not None][:sess.n_games]
    ids: dict = {}

    def ident(t):
        key = to_text(t)
        if key not in ids:
            ids[key] = S.copycat(t, sess.lat, sess.k)
        return ids[key]

    for a, b in games:
        for i, sigma in enumerate(sess.strategies(Limp(a, b))):
            obj = {"game": to_text(Limp(a, b)), "strategy": i}
            left = S.compose(ident(a), sigma)
            right = S.compose(sigma, ident(b))
            for law, res in (("left identity", left), ("right identity", right)):
                ok = res.plays == sigma.plays and not res.truncated
                out.append(record("category", law, obj, _bounds_of(res, sess), ok,
                                  None if ok else _diff(res.plays, sigma.plays)))
    by_dom: dict = {}
    for a, b in games:
        by_dom.setdefault(to_text(a), []).append((a, b))
    triples = []
    for a, b in games:
        for _, c in by_dom.get(to_text(b), []):
            for _, d in by_dom.get(to_text(c), []):
                triples.append((a, b, c, d))
    # games chain through shared objects; pad with A -o A -o A -o B chains
    for a, b in games:
        triples.append((a, a, b, b))
        triples.append((a, b, b, b))
    cases = []
    triples = [t for t in triples
               if all(game_size(Limp(x, y), sess.lat, sess.k) <= sess.max_moves for x, y in zip(t, t[1:]))]
    for a, b, c, d in triples:
        ss = [sess.strategies(Limp(x, y)) for x, y in ((a, b), (b, c), (c, d))]
        if any(s is None for s in ss):
            continue
        for combo in itertools.product(*[range(len(s)) for s in ss]):
            cases.append(((a, b, c, d), combo, ss))
    for (a, b, c, d), combo, ss in cases:
        s1, s2, s3 = (ss[j][combo[j]] for j in range(3))
        lhs = S.compose(S.compose(s1, s2), s3)
        rhs = S.compose(s1, S.compose(s2, s3))
        ok = lhs.plays == rhs.plays and not (lhs.truncated or rhs.truncated)
        obj = {"games": [to_text(Limp(x, y)) for x, y in ((a, b), (b, c), (c, d))], "strategies": list(combo)}
        out.append(record("category", "associativity", obj, _bounds_of(lhs, sess), ok,
                          None if ok else _diff(lhs.plays, rhs.plays)))
    return out


def _bounds_of(st, sess):
    return {"copy_bound": st.k, "max_len": min(st.max_len, sess.max_len) if not st.complete else st.max_len,
            "complete": st.complete}


def all_strategies(sess: Session):
    games = [g for g in morphism_corpus(sess.seed, sess.lat, 4 * sess.n_games, sess.k, sess.max_moves)
             if sess.strategies(Limp(*g)) is not None][:sess.n_games]
    for a, b in games:
        for i, st in enumerate(sess.strategies(Limp(a, b))):
            yield {"game": to_text(st.game), "strategy": i}, st


def suite_skeleton(sess: Session) -> list:
    out = []
    bounds = sess.bounds
    per_game: dict = {}
    for obj, sigma in all_strategies(sess):
        per_game.setdefault(obj["game"], []).append(sigma)
        phi = S.extract_skeleton(sigma)
        psi = S.extract_skeleton(sigma, S.greatest_choice)
        sat = S.saturate(phi)
        out.append(record("skeleton", "saturate after extract", obj, bounds, sat.plays == sigma.plays,
                          None if sat.plays == sigma.plays else _diff(sat.plays, sigma.plays)))
        ok = bool(S.is_skeleton_of(phi, sigma)) and bool(S.is_skeleton(sigma.game, sigma.lat, sigma.k, phi.plays,
                                                                         sigma.max_len))
        out.append(record("skeleton", "extracted set is a skeleton", obj, bounds, ok))
        ok = S.skeleton_preorder(phi, psi) and S.skeleton_preorder(psi, phi)
        out.append(record("skeleton", "two skeletons mutually below", obj, bounds, ok))
        union = set()
        for s in sigma.plays:
            union |= S.saturate(S.extract_skeleton(sigma, S.guided_choice(s))).plays
        out.append(record("skeleton", "union of guided skeletons", obj, bounds, union == set(sigma.plays)))
    for game, sts in sorted(per_game.items()):
        skels = [S.extract_skeleton(s) for s in sts]
        for i, j in itertools.product(range(len(sts)), repeat=2):
            direct = S.skeleton_preorder(skels[i], skels[j], method="direct")
            via_sat = S.skeleton_preorder(skels[i], skels[j])
            inclusion = sts[i].plays <= sts[j].plays
            ok = direct == via_sat == inclusion
            out.append(record("skeleton", "preorder iff saturation inclusion",
                              {"game": game, "strategies": [i, j]}, bounds, ok,
                              detail=None if ok else f"direct={direct} saturation={via_sat} inclusion={inclusion}"))
    return out


def _same_denotation(t1, t2, lat, k, max_len):
    """(ok, detail, witness) where the witness is a play valid in exactly one game."""
    v1, v2 = view(t1, lat, k), view(t2, lat, k)
    if v1.info != v2.info:
        diff = sorted(set(v1.info.items()) ^ set(v2.info.items()), key=str)[:1]
        return False, f"move data differ at {diff}", None
    p1 = set(enumerate_plays(v1, max_len))
    p2 = set(enumerate_plays(v2, max_len))
    if p1 != p2:
        w = _diff(p1, p2)[0]
        side, game = ("right", t2) if w in p2 else ("left", t1)
        return False, f"play sets differ; only the {side} game {to_text(game)} admits it", {"game": game, "play": w}
    return True, None, None


def _denotation_record(law, objects, bounds, res):
    ok, why, wit = res
    if wit is not None:
        objects = dict(objects, witness_game=to_text(wit["game"]))
    return record("monad", law, objects, bounds, ok, [wit["play"]] if wit else None, why)


def suite_monad(sess: Session) -> list:
    out = []
    lat = sess.lat
    objs = type_corpus(sess.seed, lat, sess.n_games, sess.k, sess.max_moves // 2)
    elems = sorted(lat.elements)
    bounds = sess.bounds
    pairs = list(zip(objs, objs[1:] + objs[:1]))
    for l in elems:
        for a, b in pairs:
            res = _same_denotation(Monad(l, Limp(a, b)), Limp(Monad(l, a), Monad(l, b)), lat, sess.k, sess.max_len)
            out.append(_denotation_record("level monad distributes over -o",
                                          {"level": l, "types": [to_text(a), to_text(b)]}, bounds, res))
        for a in objs:
            for l2 in elems:
                res = _same_denotation(Monad(l, Monad(l2, a)), Monad(lat.join(l, l2), a), lat, sess.k,
                                       sess.max_len)
                out.append(_denotation_record("nested monads join", {"levels": [l, l2], "type": to_text(a)},
                                              bounds, res))
    for a in objs:
        res = _same_denotation(Monad(lat.bottom, a), a, lat, sess.k, sess.max_len)
        out.append(_denotation_record("bottom monad is identity", {"type": to_text(a)}, bounds, res))
    # functorial action and unit/coercion checks on small flats
    x = Flat("X", 2, lat.bottom)
    cc = S.copycat(x, lat, sess.k)
    eta = S.unit_eta(lat.bottom, x, lat, sess.k)
    out.append(record("monad", "bottom unit is copy-cat", {"type": to_text(x)}, bounds, eta.plays == cc.plays))
    for l in elems:
        for l2 in elems:
            if lat.leq(l, l2):
                c = S.coerce(l, l2, x, lat, sess.k)
                ok = c.plays == cc.plays
                out.append(record("monad", "coercion is copy-cat", {"levels": [l, l2], "type": to_text(x)},
                                  bounds, ok))
                for i, sigma in enumerate(sess.strategies(Limp(x, x)) or []):
                    v = S.naturality_check(c, sigma, l, l2)
                    out.append(record("monad", "coercion is natural",
                                      {"levels": [l, l2], "strategy": i}, bounds, v.ok, v.witnesses or None))
    return out


def suite_comonad(sess: Session) -> list:
    out = []
    lat, k = sess.lat, sess.k
    objs = [Flat("X", 1, lat.bottom), Flat("X", 2, lat.bottom), Monad("a", Flat("Y", 1, lat.bottom)),
            With(Flat("X", 1, lat.bottom), Flat("Y", 1, "b"))]
    bounds = {"copy_bound": k, "complete": True}
    for a in objs:
        obj = {"type": to_text(a)}
        ident = S.copycat(Bang(a), lat, k)
        delta = S.comultiplication(a, lat, k)
        left = S.compose(delta, S.counit(Bang(a), lat, k))
        right = S.compose(delta, S.bang_functor(S.counit(a, lat, k)))
        out.append(record("comonad", "delta then counit", obj, bounds, left.plays == ident.plays,
                          None if left.plays == ident.plays else _diff(left.plays, ident.plays)))
        out.append(record("comonad", "delta then bang counit", obj, bounds, right.plays == ident.plays,
                          None if right.plays == ident.plays else _diff(right.plays, ident.plays)))
        bf = S.bang_functor(S.copycat(a, lat, k))
        out.append(record("comonad", "bang preserves identity", obj, bounds, bf.plays == ident.plays))
        prom = S.promote(S.counit(a, lat, k))
        out.append(record("comonad", "promoted counit is identity", obj, bounds, prom.plays == ident.plays))
        for i, sigma in enumerate(sess.strategies(Limp(Bang(a), a)) or []):
            res = S.compose(S.promote(sigma), S.counit(a, lat, k))
            out.append(record("comonad", "promotion then counit", dict(obj, strategy=i), bounds,
                              res.plays == sigma.plays, None if res.plays == sigma.plays else _diff(res.plays, sigma.plays)))
    pairs = [(objs[0], objs[2]), (objs[0], objs[0])]
    for a, b in pairs:
        obj = {"types": [to_text(a), to_text(b)]}
        f = S.exp_iso(a, b, lat, k)
        g = S.exp_iso(a, b, lat, k, inverse=True)
        fg = S.compose(f, g)
        gf = S.compose(g, f)
        ok1 = fg.plays == S.copycat(Bang(With(a, b)), lat, k).plays
        # !A ⊗ !B opens up to 2k threads but !(A & B) only k, so the round
        # trip through the bounded middle game is exact on plays with ≤ k threads
        cc = S.copycat(Tensor(Bang(a), Bang(b)), lat, k).plays
        fitting = {s for s in cc if _threads_in_tensor_of_bangs(s) <= k}
        ok2 = gf.plays == fitting
        out.append(record("comonad", "exponential iso (forth then back)", obj, bounds, ok1))
        out.append(record("comonad", "exponential iso (back then forth)", obj,
                          dict(bounds, max_threads=k), ok2))
        t = S.tensor_strategy(S.copycat(a, lat, k), S.copycat(b, lat, k))
        ok = t.plays == S.copycat(Tensor(a, b), lat, k).plays
        out.append(record("monoidal", "tensor of identities", obj, bounds, ok))
    # currying is a bijection on strategy sets
    for a, b, c in [(objs[0], objs[0], objs[0]), (objs[0], objs[2], objs[1])]:
        game = Limp(Tensor(a, b), c)
        sts = sess.strategies(game) or []
        curried = [S.curry(s) for s in sts]
        back_ok = all(S.uncurry(cs).plays == s.plays for cs, s in zip(curried, sts))
        target = sess.strategies(Limp(a, Limp(b, c))) or []
        onto = {cs.plays for cs in curried} == {t.plays for t in target}
        out.append(record("monoidal", "curry is a bijection", {"game": to_text(game), "strategies": len(sts)},
                          sess.bounds, back_ok and onto and len(sts) == len(target)))
    return out


def _threads_in_tensor_of_bangs(s) -> int:
    """Distinct (side, index) threads opened on the codomain of !A ⊗ !B -o !A ⊗ !B."""
    return len({(m[1][0], m[1][1][1]) for m in s if m[0] == "B"})


def suite_no_flow(sess: Session, k: int = 1, max_len: int = 6) -> list:
    out = []
    lat = sess.lat
    objs = type_corpus(sess.seed + 3, lat, 12, k, 4)
    bounds = {"copy_bound": k, "max_len": max_len, "context": "I"}
    for a, b in itertools.product(objs, objs):
        obj = {"from": to_text(a), "to": to_text(b)}
        if rhd(a, b, lat):
            bad = no_flow_oracle(a, b, lat, k, max_len)
            out.append(record("no-flow", "no strategy moves in the source", obj, bounds, not bad,
                              None if not bad else [s for s in bad[0].sorted_plays() if s][-1:]))
        else:
            fv = no_flow(a, b, lat, k=k)
            w = fv.witness
            v = view(w.game, lat, k)
            ok = all(not validate_play(v, s) for s in w.plays) and moves_in_component(w, "A")[0]
            out.append(record("no-flow", "witness moves in the source", obj, bounds, ok))
    return out


def suite_incomparable(sess: Session, max_len: int = 6) -> list:
    lat = sess.lat
    out = []
    nat = Flat("Nat", 2, lat.bottom)
    endo = Limp(nat, nat)
    sigma = S.make_strategy(endo, lat, sess.k, [[("B", ("q",)), ("B", ("a", 0))]])
    sigma2 = S.make_strategy(endo, lat, sess.k, [[("B", ("q",)), ("B", ("a", 1))]])
    for a, b in itertools.permutations(sorted(lat.elements), 2):
        if lat.leq(a, b) or lat.leq(b, a):
            continue
        game = Limp(Monad(a, nat), Monad(b, nat))
        cands = list(S.enumerate_strategies(game, lat, sess.k, max_len, maximal=False))
        for i, tau in enumerate(sorted(cands, key=_strategy_key)):
            obj = {"levels": [a, b], "candidate": i}
            only_cod = all(m[0] == "B" for s in tau.plays for m in s)
            out.append(record("incomparable", "candidate plays only in codomain", obj,
                              {"copy_bound": sess.k, "max_len": max_len}, only_cod))
            v1 = S.naturality_check(tau, sigma, a, b)
            v2 = S.naturality_check(tau, sigma2, a, b)
            out.append(record("incomparable", "naturality square fails", obj,
                              {"copy_bound": sess.k, "max_len": max_len}, not (v1.ok and v2.ok)))
    return out


def suite_erasure(sess: Session) -> list:
    out = []
    for obj, sigma in all_strategies(sess):
        if not S.is_total_bounded(sigma):
            continue
        for l in sorted(sess.lat.elements):
            r = S.restrict_to_erasure(sigma, l)
            v = S.is_total_bounded(r)
            out.append(record("erasure", "erasure restriction stays total", dict(obj, level=l),
                              sess.bounds, v.ok, v.witnesses or None))
    return out


SUITES = {
    "category": suite_category,
    "skeleton": suite_skeleton,
    "monad": suite_monad,
    "comonad": suite_comonad,
    "no-flow": suite_no_flow,
    "incomparable": suite_incomparable,
    "erasure": suite_erasure,
}


def run_suites(sess: Session, names=None, full: bool = False) -> dict:
    """Run suites; passing checks are counted per law, failures kept whole."""
    names = list(SUITES) if names is None else names
    results, laws, summary = [], {}, {}
    for name in names:
        recs = SUITES[name](sess)
        sess.deadline.check_time()
        results.extend(recs)
        for r in recs:
            row = laws.setdefault((name, r["law"]), {"suite": name, "law": r["law"], "checks": 0, "failures": 0})
            row["checks"] += 1
            row["failures"] += r["verdict"] == "fail"
        summary[name] = {"checks": len(recs), "failures": sum(r["verdict"] == "fail" for r in recs)}
    out = {"seed": sess.seed, "bounds": sess.bounds, "lattice": sess.lat.to_text(),
           "suites": summary, "laws": list(laws.values()),
           "failures": [r for r in results if r["verdict"] == "fail"],
           "verdict": "pass" if all(s["failures"] == 0 for s in summary.values()) else "fail"}
    if full:
        out["results"] = results
    return out
