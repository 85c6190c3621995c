import itertools

import pytest
from hypothesis import assume, given, strategies as st

from gamesec import strategy as S
from gamesec.errors import BudgetError, GameMismatchError, ProtectionError, StrategyError
from gamesec.games import Budget, enumerate_plays, play_equiv, validate_play, view
from gamesec.types import Bang, Flat, I, Limp, Monad, Tensor, With

from strategies import LAT, LEVELS, small_types

X = Flat("X", 1, "bot")
Y = Flat("Y", 2, "bot")
q, a0, a1 = ("q",), ("a", 0), ("a", 1)
B = lambda m: ("B", m)  # noqa: E731
A = lambda m: ("A", q, m)  # noqa: E731


def strategies_on(t, k=1, max_len=6, cap=200):
    """Up to ``cap`` strategies, or [] when enumeration is too costly for a unit test."""
    try:
        return list(itertools.islice(S.enumerate_strategies(t, LAT, k, max_len, Budget(20_000), maximal=False),
                                     cap))
    except BudgetError:
        return []


def tiny(t, k=1, limit=6):
    return len(view(t, LAT, k).moves) <= limit


tiny_types = small_types.filter(tiny)


# ------------------------------------------------------------ basic laws

def test_copycat_on_flat(lat):
    cc = S.copycat(X, lat, 1)
    assert cc.plays == {(), (B(q), A(q)), (B(q), A(q), A(a0), B(a0))}


def test_is_strategy_rejects_bad_sets(lat):
    t = Limp(X, Y)
    assert S.is_strategy(t, lat, 1, [()])
    assert not S.is_strategy(t, lat, 1, [(B(q), B(("a", 0)))])
    two = [(), (B(q), B(a0)), (B(q), B(a1))]
    assert S.is_strategy(t, lat, 1, two).law == "determinacy"
    assert S.is_strategy(t, lat, 1, [(), (B(q),)]).law == "even length"


def brute_force_strategies(t, max_len):
    """Oracle: every subset of even plays that passes the strategy checker."""
    v = view(t, LAT, 1)
    even = [s for s in enumerate_plays(v, max_len) if s and len(s) % 2 == 0]
    out = set()
    for r in range(len(even) + 1):
        for c in itertools.combinations(even, r):
            if S.is_strategy(t, LAT, 1, [()] + list(c), max_len):
                out.add(frozenset([()] + list(c)))
    return out


def test_enumeration_matches_subset_oracle():
    t = Limp(X, X)
    got = {s.plays for s in strategies_on(t, max_len=4)}
    assert got == brute_force_strategies(t, 4)
    assert len(got) == 4  # {ε}, constant, strict-and-stuck, copy-cat


@given(tiny_types, tiny_types)
def test_enumeration_matches_subset_oracle_randomly(a, b):
    t = Limp(a, b)
    v = view(t, LAT, 1)
    if len([s for s in enumerate_plays(v, 4) if s and len(s) % 2 == 0]) > 10:
        return
    assert {s.plays for s in strategies_on(t, max_len=4)} == brute_force_strategies(t, 4)


# ------------------------------------------------------------ skeletons

def saturation_oracle(phi):
    v = phi.view
    return {s for s in enumerate_plays(v, phi.max_len)
            if len(s) % 2 == 0 and any(len(p) == len(s) and play_equiv(v, s, p) for p in phi.plays)}


def test_bang_skeleton_saturates_over_indices(lat):
    t = Limp(Bang(X), X)
    phi = S.Strategy(t, lat, 3, 4, frozenset({(), (B(q), ("A", q, ("!", 0, q))),
                                              (B(q), ("A", q, ("!", 0, q)), ("A", q, ("!", 0, a0)), B(a0))}))
    assert S.is_skeleton(t, lat, 3, phi.plays)
    sat = S.saturate(phi)
    assert len(sat.plays) == 7  # ε and the copy-cat threaded through each of 3 indices
    assert sat.plays == saturation_oracle(phi)
    assert sat == S.counit(X, lat, 3, 4)


@given(st.data(), small_types, small_types)
def test_extract_then_saturate_is_identity(data, a, b):
    sts = strategies_on(Limp(a, b), k=2, max_len=4)
    assume(sts)
    sigma = data.draw(st.sampled_from(sts))
    for choose in (S.least_choice, S.greatest_choice):
        phi = S.extract_skeleton(sigma, choose)
        assert S.is_skeleton(phi.game, LAT, 2, phi.plays, phi.max_len)
        assert S.is_skeleton_of(phi, sigma)
        assert S.saturate(phi).plays == sigma.plays
        assert S.saturate(phi).plays == saturation_oracle(phi)
    lo, hi = S.extract_skeleton(sigma, S.least_choice), S.extract_skeleton(sigma, S.greatest_choice)
    assert S.skeleton_preorder(lo, hi) and S.skeleton_preorder(hi, lo)


@given(st.data(), small_types, small_types)
def test_preorder_methods_agree(data, a, b):
    t = Limp(a, b)
    sts = strategies_on(t, k=2, max_len=4)
    assume(sts)
    s1, s2 = data.draw(st.sampled_from(sts)), data.draw(st.sampled_from(sts))
    p1, p2 = S.extract_skeleton(s1), S.extract_skeleton(s2)
    direct = S.skeleton_preorder(p1, p2, method="direct")
    assert direct == S.skeleton_preorder(p1, p2, method="saturation") == (s1.plays <= s2.plays)


def test_make_strategy_rejects_invalid_plays(lat):
    with pytest.raises(StrategyError):
        S.make_strategy(Limp(X, X), lat, 1, [(), (A(q), B(q))])


# ------------------------------------------------------------ composition

def test_composition_by_hand(lat):
    cc = S.copycat(X, lat, 1)
    inc = S.make_strategy(Limp(X, Y), lat, 1, [(), (B(q), A(q)), (B(q), A(q), A(a0), B(a1))])
    const = S.make_strategy(Limp(X, X), lat, 1, [(), (B(q), B(a0))])
    assert S.compose(cc, inc).plays == inc.plays
    assert S.compose(const, inc).plays == {(), (B(q), B(a1))}


def test_composition_rejects_mismatched_middles(lat):
    with pytest.raises(GameMismatchError):
        S.compose(S.copycat(X, lat, 1), S.copycat(Y, lat, 1))


@given(st.data(), small_types, small_types)
def test_identity_laws(data, a, b):
    t = Limp(a, b)
    sts = strategies_on(t, k=1, max_len=6)
    assume(sts)
    sigma = data.draw(st.sampled_from(sts))
    assert S.compose(S.copycat(a, LAT, 1), sigma).plays == sigma.plays
    assert S.compose(sigma, S.copycat(b, LAT, 1)).plays == sigma.plays


@given(st.data(), tiny_types, tiny_types, tiny_types)
def test_associativity(data, a, b, c):
    pools = [strategies_on(Limp(x, y)) for x, y in ((a, b), (b, c), (c, a))]
    assume(all(pools))
    s1, s2, s3 = (data.draw(st.sampled_from(p)) for p in pools)
    left = S.compose(S.compose(s1, s2), s3)
    right = S.compose(s1, S.compose(s2, s3))
    assert left.plays == right.plays


def test_composite_plays_validate(lat):
    sigma = S.comultiplication(X, lat, 2)
    tau = S.counit(Bang(X), lat, 2)
    comp = S.compose(sigma, tau)
    assert all(not validate_play(comp.view, s) for s in comp.plays)


# ------------------------------------------------------------ monoidal closure

def test_curry_uncurry_roundtrip(lat):
    t = Limp(Tensor(X, X), X)
    for sigma in strategies_on(t, max_len=6):
        c = S.curry(sigma)
        assert c.game == Limp(X, Limp(X, X))
        assert S.uncurry(c).plays == sigma.plays


def test_tensor_of_identities_is_identity(lat):
    cc = S.tensor_strategy(S.copycat(X, lat, 1), S.copycat(Y, lat, 1))
    assert cc.plays == S.copycat(Tensor(X, Y), lat, 1).plays


def test_projections(lat):
    pl = S.projection(X, Y, "L", lat, 1)
    assert (B(q), ("A", q, ("L", q))) in pl.plays
    assert not any(m[0] == "A" and m[2][0] == "R" for s in pl.plays for m in s)


# ------------------------------------------------------------ the ! comonad

def test_cantor_pairing():
    seen = {S.cantor_pair(i, j) for i in range(10) for j in range(10)}
    assert len(seen) == 100
    assert [S.cantor_pair(i, j) for i, j in [(0, 0), (1, 0), (0, 1), (2, 0)]] == [0, 1, 2, 3]
    with pytest.raises(BudgetError):
        S.cantor_pair(1, 1, 2)


def test_cantor_skeleton_saturates_to_delta(lat):
    phi = S.cantor_delta_skeleton(X, lat, 3, 4)
    assert S.saturate(phi).plays == S.comultiplication(X, lat, 3, 4).plays


@pytest.mark.parametrize("t", [X, Y, Tensor(X, X)], ids=str)
def test_comonad_laws(lat, t):
    k = 2
    delta = S.comultiplication(t, lat, k)
    cc = S.copycat(Bang(t), lat, k)
    assert S.compose(delta, S.counit(Bang(t), lat, k)).plays == cc.plays
    assert S.compose(delta, S.bang_functor(S.counit(t, lat, k))).plays == cc.plays


def test_promotion_of_counit_is_identity(lat):
    assert S.promote(S.counit(X, lat, 2)).plays == S.copycat(Bang(X), lat, 2).plays


def test_bang_of_identity(lat):
    assert S.bang_functor(S.copycat(X, lat, 2)).plays == S.copycat(Bang(X), lat, 2).plays


def test_exponential_iso_forth_then_back(lat):
    forth = S.exp_iso(X, Y, lat, 2)
    back = S.exp_iso(X, Y, lat, 2, inverse=True)
    assert S.compose(forth, back).plays == S.copycat(Bang(With(X, Y)), lat, 2).plays


# ------------------------------------------------------------ level monads

def test_unit_and_coercion(lat):
    eta = S.unit_eta("a", X, lat, 1)
    assert eta.game == Limp(X, Monad("a", X))
    assert eta.plays == S.copycat(X, lat, 1).plays
    assert S.coerce("a", "t", X, lat, 1).plays == S.copycat(X, lat, 1).plays


def test_coercion_down_is_refused_with_levels(lat):
    with pytest.raises(ProtectionError) as info:
        S.coerce("a", "b", X, lat, 1)
    assert (info.value.required, info.value.found) == ("a", "b")
    assert info.value.witness == (B(q), A(q))


@given(st.sampled_from(LEVELS), st.sampled_from(LEVELS))
def test_coercion_is_natural(l1, l2):
    if not LAT.leq(l1, l2):
        return
    c = S.coerce(l1, l2, X, LAT, 1)
    for sigma in strategies_on(Limp(X, X), max_len=4):
        assert S.naturality_check(c, sigma, l1, l2)


# ------------------------------------------------------------ totality, history-free

def test_totality(lat):
    assert S.is_total_bounded(S.copycat(X, lat, 1))
    stuck = S.make_strategy(Limp(X, X), lat, 1, [(), (B(q), A(q))])
    verdict = S.is_total_bounded(stuck)
    assert not verdict and verdict.witnesses == [(B(q), A(q), A(a0))]


def test_history_free_copycat(lat):
    f = {B(q): A(q), A(a0): B(a0)}
    phi = S.from_generator(S.HistoryFreeGenerator(Limp(X, X), f), lat, 1)
    assert phi.plays == S.copycat(X, lat, 1).plays
    assert S.history_free_conditions(phi)


def test_history_free_rejects_illegal_response(lat):
    with pytest.raises(StrategyError):
        S.from_generator(S.HistoryFreeGenerator(Limp(X, X), {B(q): A(a0)}), lat, 1)


def test_erasure_restriction(lat):
    t = Limp(Monad("a", X), X)
    sigma = S.make_strategy(t, lat, 1, [(), (B(q), B(a0))])
    low = S.restrict_to_erasure(sigma, "a")
    assert low.game == Limp(I, X) and low.plays == sigma.plays
    assert S.is_total_bounded(low)
