"""Static security analysis: initial-move levels, the ⊳ relation, the
no-flow decision with witness synthesis, protected types and protected
promotion."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import GameMismatchError, ProtectionError
from .games import serialize, serialize_play, validate_play, view
from .lattice import SecurityLattice
from .strategy import (
    Strategy, _split_limp, compose, is_strategy, promote, saturate,
)
from .types import Bang, Flat, GameType, I, Limp, Monad, Tensor, Unit, With, same_game, to_text


def level_of_type(t: GameType, lat: SecurityLattice) -> frozenset:
    """Levels of the initial moves, computed on the syntax."""
    if isinstance(t, Flat):
        return frozenset({t.level})
    if isinstance(t, Unit):
        return frozenset()
    if isinstance(t, (Tensor, With)):
        return level_of_type(t.left, lat) | level_of_type(t.right, lat)
    if isinstance(t, Bang):
        return level_of_type(t.body, lat)
    if isinstance(t, Limp):
        return level_of_type(t.cod, lat)
    if isinstance(t, Monad):
        return frozenset(lat.join(t.level, l) for l in level_of_type(t.body, lat))
    raise TypeError(f"not a game type: {t!r}")


def semantic_levels(t: GameType, lat: SecurityLattice, k: int = 1) -> frozenset:
    """Levels of the initial moves, read off the denoted game."""
    v = view(t, lat, k)
    return frozenset(v.info[m].level for m in v.initials)


def rhd(a: GameType, b: GameType, lat: SecurityLattice) -> bool:
    """A ⊳ B: no initial level of A is below an initial level of B."""
    lb = level_of_type(b, lat)
    return all(not lat.leq(x, y) for x in level_of_type(a, lat) for y in lb)


def is_protected(t: GameType, level: str, lat: SecurityLattice) -> bool:
    lat.check(level)
    return all(lat.leq(level, x) for x in level_of_type(t, lat))


@dataclass
class FlowVerdict:
    source: GameType
    target: GameType
    flow_possible: bool
    witness: Strategy | None = None
    context: GameType = field(default_factory=lambda: I)

    @property
    def verdict(self) -> str:
        return "flow-possible" if self.flow_possible else "no-flow"

    def as_dict(self, with_witness: bool = True):
        out = {"query": {"from": to_text(self.source), "to": to_text(self.target),
                         "context": to_text(self.context)},
               "verdict": self.verdict}
        if self.witness is not None and with_witness:
            out["witness"] = {"game": to_text(self.witness.game),
                              "bounds": {"copy_bound": self.witness.k, "max_len": self.witness.max_len},
                              "plays": [serialize_play(s) for s in self.witness.sorted_plays()]}
        return out


def flow_game(a: GameType, b: GameType, c: GameType = I) -> Limp:
    return Limp(Tensor(a, c), b)


def no_flow(a: GameType, b: GameType, lat: SecurityLattice, c: GameType = I, k: int = 1) -> FlowVerdict:
    """Decide A ↛ B; when flow is possible, synthesize {ε, m'·m} on A⊗C -o B."""
    if rhd(a, b, lat):
        return FlowVerdict(a, b, False, None, c)
    game = flow_game(a, b, c)
    v = view(game, lat, k)
    va, vb = view(a, lat, k), view(b, lat, k)
    for mb in vb.initials:
        for ma in va.initials:
            if lat.leq(va.info[ma].level, vb.info[mb].level):
                s = (("B", mb), ("A", mb, ("L", ma)))
                diags = validate_play(v, s)
                if diags:
                    raise AssertionError(f"synthesized witness invalid: {diags[0].reason}")
                sigma = saturate(Strategy(game, lat, k, 2, frozenset({(), s})))
                verdict = is_strategy(game, lat, k, sigma.plays, 2)
                if not verdict:
                    raise AssertionError(f"synthesized witness is not a strategy: {verdict.law}")
                return FlowVerdict(a, b, True, sigma, c)
    raise AssertionError("rhd false but no initial pair found")


def _component_of(m):
    if m[0] == "B":
        return "B"
    return "A" if m[2][0] == "L" else "C"


def moves_in_component(sigma: Strategy, component: str):
    """Does σ on A⊗C -o B ever play a move of the given component?

    For component 'A' the answer comes with the factored strategy on C -o B
    when σ never touches A (None otherwise).
    """
    dom, cod = _split_limp(sigma.game)
    if not isinstance(dom, Tensor):
        raise GameMismatchError(f"expected a game (A * C) -o B, got {to_text(sigma.game)}")
    touched = any(_component_of(m) == component for s in sigma.plays for m in s)
    if component != "A":
        return touched, None
    if touched:
        return True, None
    game = Limp(dom.right, cod)

    def f(m):
        return m if m[0] == "B" else ("A", m[1], m[2][1])
    plays = frozenset(tuple(f(m) for m in s) for s in sigma.plays)
    return False, Strategy(game, sigma.lat, sigma.k, sigma.max_len, plays, sigma.truncated)


def weaken(sigma: Strategy, a: GameType) -> Strategy:
    """σ : C -o B read as a strategy on A⊗C -o B that ignores A."""
    c, b = _split_limp(sigma.game)
    game = Limp(Tensor(a, c), b)

    def f(m):
        return m if m[0] == "B" else ("A", m[1], ("R", m[2]))
    plays = frozenset(tuple(f(m) for m in s) for s in sigma.plays)
    return Strategy(game, sigma.lat, sigma.k, sigma.max_len, plays, sigma.truncated).with_game(game)


def unprotected_initial(t: GameType, level: str, lat: SecurityLattice, k: int = 1):
    v = view(t, lat, k)
    for m in v.initials:
        if not lat.leq(level, v.info[m].level):
            return m
    return None


def protected_promotion(sigma: Strategy, tau: Strategy, level: str, max_len: int | None = None) -> Strategy:
    """σ : !A -> [l]B and τ : !B -> C give σ†;τ : !A -> C when C is protected at l."""
    lat = sigma.lat
    bang_a, tb = _split_limp(sigma.game)
    bang_b, c = _split_limp(tau.game)
    if not isinstance(bang_a, Bang) or not isinstance(bang_b, Bang):
        raise GameMismatchError("protected promotion needs σ : !A -> [l]B and τ : !B -> C")
    if not same_game(tb, Monad(level, bang_b.body), lat):
        raise GameMismatchError(f"σ's codomain {to_text(tb)} is not [{level}]{to_text(bang_b.body)}")
    if not is_protected(c, level, lat):
        bad = unprotected_initial(c, level, lat, tau.k)
        lv = view(c, lat, tau.k).info[bad].level
        raise ProtectionError(
            f"{to_text(c)} is not protected at {level}: initial move {serialize(bad)} has level {lv}",
            required=level, found=lv, witness=(("B", bad),))
    tau2 = tau.with_game(Limp(Bang(Monad(level, bang_b.body)), c))
    sigma2 = sigma.with_game(Limp(bang_a, Monad(level, bang_b.body)))
    return compose(promote(sigma2), tau2, max_len)


def no_flow_oracle(a: GameType, b: GameType, lat: SecurityLattice, k: int = 1, max_len: int = 6,
                   c: GameType = I):
    """Every enumerated strategy on A⊗C -o B that moves in A (the oracle side)."""
    from .strategy import enumerate_strategies
    bad = []
    for sigma in enumerate_strategies(flow_game(a, b, c), lat, k, max_len):
        if moves_in_component(sigma, "A")[0]:
            bad.append(sigma)
    return bad

