import itertools

import pytest
from hypothesis import given, strategies as st

from gamesec.errors import MembershipError, TypeSyntaxError
from gamesec.games import (O, P, Q, canon, enumerate_plays, is_play, play_equiv, validate_play,
                           view)
from gamesec.types import (Bang, Flat, I, Limp, Monad, Tensor, With, erase_type, parse_type,
                           to_text)

from strategies import LAT, LEVELS, small_types

X = Flat("X", 1, "bot")
NAT = Flat("Nat", 2, "bot")
q, a0, a1 = ("q",), ("a", 0), ("a", 1)


def conditions(v, s):
    return {d.condition for d in validate_play(v, s)}


# ------------------------------------------------------------ parsing

def test_grammar_precedence(lat):
    t = parse_type("X@bot/1 * X@bot/1 -o [a]X@bot/1 -o X@bot/1", lat)
    assert t == Limp(Tensor(X, X), Limp(Monad("a", X), X))
    assert parse_type("A@bot/1 -> B@bot/1", lat) == Limp(Bang(Flat("A", 1, "bot")), Flat("B", 1, "bot"))
    assert parse_type("X@bot/1 & X@bot/1 & X@bot/1", lat) == With(With(X, X), X)


@given(small_types)
def test_print_parse_roundtrip(t):
    assert parse_type(to_text(t), LAT) == t


def test_syntax_error_carries_position(lat):
    with pytest.raises(TypeSyntaxError) as info:
        parse_type("X@bot/1 -o", lat)
    assert info.value.line == 1 and info.value.col > 1


# ------------------------------------------------------------ denotation

def test_flat_game_moves(lat):
    v = view(NAT, lat, 1)
    assert set(v.moves) == {q, a0, a1}
    assert v.info[q] == (O, Q, "bot", None)
    assert all(v.info[m] == (P, "A", "bot", q) for m in (a0, a1))


def test_monad_raises_levels_only(lat):
    v, w = view(Monad("a", Flat("B", 1, "bot")), lat, 1), view(Flat("B", 1, "bot"), lat, 1)
    assert set(v.moves) == set(w.moves)
    assert all(v.level(m) == "a" for m in v.moves)


def test_limp_one_copy_per_initial(lat):
    v = view(Limp(X, Flat("Y", 1, "bot")), lat, 1)
    arg = [m for m in v.moves if m[0] == "A"]
    assert sorted(arg) == [("A", q, a0), ("A", q, q)]
    assert v.polarity(("A", q, q)) == P and v.justifier(("A", q, q)) == ("B", q)


def test_foreign_move_is_a_membership_error(lat):
    with pytest.raises(MembershipError):
        validate_play(view(X, lat, 1), [("a", 5)])


# ------------------------------------------------------------ play conditions

def test_flat_plays(lat):
    v = view(Flat("Nat", 6, "bot"), lat, 1)
    assert validate_play(v, [q, ("a", 5)]) == []
    assert {"p1", "p5"} <= conditions(v, [("a", 5), q])


# one counterexample per condition; each is flagged by that condition alone
MUTANTS = [
    ("p1", X, [a0]),
    ("p2", Tensor(X, X), [("L", q), ("R", q)]),
    ("p3", X, [q, a0, q]),
    ("p4", Limp(Limp(X, X), X), [("B", q), ("A", q, ("B", q)), ("A", q, ("A", q, q)), ("B", a0)]),
    ("p5", Tensor(X, X), [("L", q), ("R", a0)]),
    ("p6", Limp(Monad("a", X), Monad("b", X)), [("B", q), ("A", q, q)]),
]


@pytest.mark.parametrize("cond,t,s", MUTANTS, ids=[m[0] for m in MUTANTS])
def test_each_condition_has_its_own_counterexample(lat, cond, t, s):
    v = view(t, lat, 1)
    got = conditions(v, [tuple(m) for m in s])
    assert cond in got
    assert got - {"p1", "p5"} <= {cond} or cond in ("p1",)


def test_p6_example_from_incomparable_levels(lat):
    v = view(Limp(Monad("a", X), Monad("b", Flat("Y", 1, "bot"))), lat, 1)
    assert conditions(v, [("B", q), ("A", q, q)]) == {"p6"}


# ------------------------------------------------------------ enumeration

def test_enumerate_nat(lat):
    assert set(enumerate_plays(view(NAT, lat, 1), 2)) == {(), (q,), (q, a0), (q, a1)}


def test_enumerate_unit(lat):
    assert enumerate_plays(view(I, lat, 1), 10) == [()]


def test_enumerate_identity_game(lat):
    v = view(Limp(X, X), lat, 1)
    plays = set(enumerate_plays(v, 4))
    copy = [(), (("B", q),), (("B", q), ("A", q, q)), (("B", q), ("A", q, q), ("A", q, a0)),
            (("B", q), ("A", q, q), ("A", q, a0), ("B", a0))]
    # the immediate answer q·a in the codomain is a play as well
    assert plays == set(copy) | {(("B", q), ("B", a0))}
    assert plays == brute_force_plays(v, 4)


def brute_force_plays(v, n):
    """Oracle: every sequence over the move set, filtered by validate_play."""
    out = {()}
    for length in range(1, n + 1):
        for s in itertools.product(v.moves, repeat=length):
            if not validate_play(v, s):
                out.add(s)
    return out


@given(small_types.filter(lambda t: len(view(t, LAT, 1).moves) <= 6))
def test_enumeration_matches_brute_force(t):
    v = view(t, LAT, 1)
    assert set(enumerate_plays(v, 4)) == brute_force_plays(v, 4)


@given(small_types)
def test_enumerated_plays_validate(t):
    v = view(t, LAT, 1)
    for s in enumerate_plays(v, 6):
        assert is_play(v, s)


@given(small_types, st.sampled_from(LEVELS))
def test_monad_keeps_the_play_set(t, lv):
    assert enumerate_plays(view(Monad(lv, t), LAT, 1), 6) == enumerate_plays(view(t, LAT, 1), 6)


@given(small_types, st.sampled_from(LEVELS), st.sampled_from(LEVELS))
def test_nested_monads_and_bottom(t, l1, l2):
    nested, joined = view(Monad(l1, Monad(l2, t)), LAT, 1), view(Monad(LAT.join(l1, l2), t), LAT, 1)
    assert nested.info == joined.info
    assert view(Monad("bot", t), LAT, 1).info == view(t, LAT, 1).info


@given(small_types, small_types, st.sampled_from(LEVELS))
def test_monad_distributes_over_tensor_and_with(s, t, lv):
    for ctor in (Tensor, With):
        left, right = view(Monad(lv, ctor(s, t)), LAT, 1), view(ctor(Monad(lv, s), Monad(lv, t)), LAT, 1)
        assert left.info == right.info
        assert enumerate_plays(left, 4) == enumerate_plays(right, 4)


def test_linearity_single_copy_per_domain_move(lat):
    t = Limp(X, Tensor(X, X))
    for s in enumerate_plays(view(t, lat, 1), 8):
        inner = [m[2] for m in s if m[0] == "A"]
        assert len(inner) == len(set(inner))


# ------------------------------------------------------------ equivalence

def test_bang_index_permutation(lat):
    v = view(Bang(X), lat, 4)
    assert play_equiv(v, [("!", 0, q), ("!", 0, a0)], [("!", 3, q), ("!", 3, a0)])


def test_tensor_interleaving_matters(lat):
    v = view(Tensor(X, X), lat, 1)
    assert not play_equiv(v, [("L", q), ("R", q)], [("R", q), ("L", q)])


@given(small_types.filter(lambda t: len(view(t, LAT, 2).moves) <= 10))
def test_equivalence_relation_and_canon(t):
    v = view(t, LAT, 2)
    plays = enumerate_plays(v, 4)
    for s in plays:
        assert play_equiv(v, s, s)
    for s, u in itertools.product(plays, repeat=2):
        eq = play_equiv(v, s, u)
        assert eq == play_equiv(v, u, s)
        assert eq == (canon(v, s) == canon(v, u))
        if eq:
            # equal-length prefixes stay equivalent
            for i in range(len(s)):
                assert play_equiv(v, s[:i], u[:i])
            assert [v.info[m][:2] for m in s] == [v.info[m][:2] for m in u]


@given(small_types.filter(lambda t: len(view(t, LAT, 2).moves) <= 10))
def test_equivalence_extension_property(t):
    v = view(t, LAT, 2)
    plays = set(enumerate_plays(v, 4))
    for s in plays:
        for u in plays:
            if len(s) == len(u) and len(s) < 4 and play_equiv(v, s, u):
                for m in v.moves:
                    if s + (m,) in plays:
                        assert any(play_equiv(v, s + (m,), u + (n,)) for n in v.moves if u + (n,) in plays)


# ------------------------------------------------------------ erasure of types

def test_erase_type_examples(lat):
    from gamesec.lattice import chain
    c = chain("bot", "h")
    assert erase_type(Monad("h", X), "h", c) == I
    assert erase_type(X, "h", c) == X
    assert erase_type(Limp(Monad("h", X), Flat("Y", 1, "bot")), "h", c) == Limp(I, Flat("Y", 1, "bot"))


@given(small_types, st.sampled_from(LEVELS))
def test_erased_plays_are_the_low_plays(t, lv):
    if lv == LAT.bottom:
        return
    v, ve = view(t, LAT, 1), view(erase_type(t, lv, LAT), LAT, 1)
    low = {s for s in enumerate_plays(v, 4) if not any(LAT.leq(lv, v.level(m)) for m in s)}
    assert set(enumerate_plays(ve, 4)) == low
