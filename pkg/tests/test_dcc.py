from importlib import resources

import pytest
from hypothesis import given, settings, strategies as st

from gamesec import strategy as S
from gamesec.dcc.enumerate import enumerate_terms
from gamesec.dcc.normalize import erase_monads, normalize
from gamesec.dcc.parser import parse_program, parse_term
from gamesec.dcc.semantics import denote, denote_term, non_interference_check
from gamesec.dcc.terms import App, Bind, Const, EtaM, Lam, Var, free_vars, fresh, show, subst
from gamesec.dcc.typing import check_against, dcc_norm, typecheck
from gamesec.errors import DCCTypeError, ProtectionError, TypeSyntaxError
from gamesec.flow import weaken
from gamesec.games import validate_play
from gamesec.lattice import chain, l4, lattice_from_text
from gamesec.types import Flat, I, Monad, arrow, as_arrow, parse_type

D = Flat("D", 2, "bot")
E = Flat("E", 1, "bot")
BASES = {"D": D, "E": E}


def term(text, lat=None):
    return parse_term(text, lat or l4(), BASES)


def example1():
    text = (resources.files("gamesec") / "data" / "example1.dcc").read_text()
    lat = chain("bot", "bob", "admin")
    return parse_program(text, lat), lat


# ------------------------------------------------------------ parsing

def test_parse_tree_shape():
    e = term(r"\x:[a]D. bind y = x in eta<a> y")
    assert e == Lam("x", Monad("a", D), Bind("y", Var("x"), EtaM("a", Var("y"))))


def test_eta_needs_a_body():
    with pytest.raises(TypeSyntaxError):
        term("eta<a>")


def test_show_parses_back():
    for text in [r"\x:D -> D. x (x D#1)", "bind f = g in eta<b> (f c)", r"(\x:D. x) D#0"]:
        e = term(text)
        assert term(show(e)) == e


def test_example1_file_parses():
    prog, _ = example1()
    assert [n for n, _ in prog.assumptions] == ["x1", "x2", "x3"]
    assert [d.kind for d in prog.directives] == ["check", "normalize", "check", "noninterference"]


def test_program_errors_carry_lines():
    with pytest.raises(TypeSyntaxError, match="^3:"):
        parse_program("base D@bot/1\nassume x : D\ncheck x :\n", l4())


# ------------------------------------------------------------ typing

def test_identity_types(lat):
    d = typecheck((), term(r"\x:D. x"), lat)
    assert d.type == arrow(D, D) and d.rule == "lam"


def test_bind_into_unprotected_body_is_refused(lat):
    ctx = (("e", Monad("a", D)),)
    with pytest.raises(ProtectionError) as info:
        typecheck(ctx, term("bind x = e in x"), lat)
    assert (info.value.required, info.value.found) == ("a", "bot")


def test_bind_records_evidence(lat):
    ctx = (("e", Monad("a", D)),)
    d = typecheck(ctx, term("bind x = e in eta<t> x"), lat)
    side = [s for n in d.nodes() for s in n.side]
    assert side == [{"condition": "protected", "type": "[t]D@bot/2", "level": "a", "evidence": ["t"]}]


@pytest.mark.parametrize("text,rule", [("y", "var"), ("D#0 D#1", "app"), ("bind x = D#0 in x", "bind")])
def test_typing_errors_name_the_rule(lat, text, rule):
    with pytest.raises(DCCTypeError) as info:
        typecheck((), term(text), lat)
    assert info.value.rule == rule


def test_type_equality_merges_monads(lat):
    assert dcc_norm(parse_type("[a][b]X@bot/1", lat), lat) == Monad("t", Flat("X", 1, "bot"))
    assert dcc_norm(parse_type("[bot]X@bot/1", lat), lat) == Flat("X", 1, "bot")


def test_example1_checks_both_ways():
    prog, lat = example1()
    for d in prog.directives[:3]:
        got = typecheck(prog.assumptions, d.term, lat)
        assert got.type == prog.bases["dfile"]


def test_example1_fails_when_admin_no_longer_dominates():
    data = resources.files("gamesec") / "data"
    lat = lattice_from_text((data / "example1-mutated.lat").read_text())
    prog2 = parse_program((data / "example1.dcc").read_text(), lat)
    with pytest.raises(ProtectionError) as info:
        typecheck(prog2.assumptions, prog2.directives[0].term, lat)
    assert {info.value.required, info.value.found} == {"bob", "admin"}


# ------------------------------------------------------------ normalization

def test_beta(lat):
    assert normalize((), term(r"(\x:D. x) D#1"), lat) == Const(D, 1)


def test_bind_substitutes_the_monadic_term(lat):
    ctx = (("f", arrow(Monad("a", D), D)),)
    got = normalize(ctx, term("bind x = eta<a> D#0 in eta<a> (f (eta<a> x))"), lat)
    assert got == normalize(ctx, term("f (eta<a> D#0)"), lat) == App(Var("f"), Const(D, 0))


def test_unit_reduces_away(lat):
    assert normalize((), term("eta<a> D#0"), lat) == Const(D, 0)


def test_eta_expansion(lat):
    got = normalize((("f", arrow(D, D)),), term("f"), lat)
    assert isinstance(got, Lam) and got.body == App(Var("f"), Var(got.name))


def test_example1_normal_form():
    prog, lat = example1()
    nf = normalize(prog.assumptions, prog.directives[0].term, lat)
    assert show(nf) == "x1 (x2 x3)"
    assert free_vars(nf) == {"x1", "x2", "x3"}


def test_free_vars():
    assert free_vars(Var("x")) == {"x"}
    assert free_vars(term(r"\x:D. x")) == frozenset()
    assert free_vars(term("bind x = y in x z")) == {"y", "z"}


def test_substitution_avoids_capture():
    e = subst(term(r"\y:D. x"), "x", Var("y"))
    assert isinstance(e, Lam) and e.name != "y" and e.body == Var("y")
    assert fresh("y", {"y", "y1"}) not in {"y", "y1"}


# Oracle for NbE: naive leftmost reduction followed by η-long expansion, compared up to α.

def _step(e):
    if isinstance(e, EtaM):
        return e.body
    if isinstance(e, Bind):
        return subst(e.body, e.name, e.bound)
    if isinstance(e, App) and isinstance(e.fn, Lam):
        return subst(e.fn.body, e.fn.name, e.arg)
    for field in ("fn", "arg", "body", "bound"):
        sub = getattr(e, field, None)
        if sub is not None:
            r = _step(sub)
            if r is not None:
                return e.__class__(**{**e.__dict__, field: r})
    return None


def naive_normal(e):
    while (r := _step(e)) is not None:
        e = r
    return e


def _expand(ctx, e, t, used):
    t = erase_monads(t)
    if isinstance(e, Lam):
        a, b = as_arrow(t)
        return Lam(e.name, a, _expand({**ctx, e.name: a}, e.body, b, used | {e.name}))
    head, args = e, []
    while isinstance(head, App):
        args.append(head.arg)
        head = head.fn
    out = head
    ht = erase_monads(ctx[head.name]) if isinstance(head, Var) else t
    for m in reversed(args):
        a, ht = as_arrow(ht)
        out = App(out, _expand(ctx, m, a, used))
    while (ar := as_arrow(t)) is not None:
        y = fresh("z", used | set(ctx))
        used = used | {y}
        out = Lam(y, ar[0], App(out, _expand({**ctx, y: ar[0]}, Var(y), ar[0], used)))
        t = ar[1]
    return out


def alpha_eq(s, t, env=()):
    env = dict(env)
    if isinstance(s, Var) and isinstance(t, Var):
        return env.get(s.name, s.name) == t.name
    if isinstance(s, Lam) and isinstance(t, Lam):
        return s.ann == t.ann and alpha_eq(s.body, t.body, {**env, s.name: t.name})
    if isinstance(s, App) and isinstance(t, App):
        return alpha_eq(s.fn, t.fn, env) and alpha_eq(s.arg, t.arg, env)
    return s == t


CTXS = [
    (("f", arrow(D, D)), ("c", D)),
    (("g", arrow(arrow(D, D), D)), ("h", arrow(D, arrow(D, D)))),
    (("m", Monad("a", D)), ("k", arrow(Monad("a", D), E))),
]


def with_redexes(ctx, t, lat):
    """Enumerated terms plus β-redexes (λv:A. body) arg built from them."""
    out = list(enumerate_terms(ctx, t, lat, 6))
    for a in (D, arrow(D, D), Monad("a", D)):
        bodies = enumerate_terms(ctx + (("v", a),), t, lat, 5)
        args = enumerate_terms(ctx, a, lat, 4)
        out += [App(Lam("v", a, b), x) for b in bodies[:12] for x in args[:4]]
    return out


@settings(max_examples=20)
@given(st.sampled_from(range(len(CTXS))), st.sampled_from([D, arrow(D, D), Monad("a", D), E]))
def test_normalization_matches_naive_reduction(i, t):
    lat = l4()
    ctx = CTXS[i]
    checked = []
    for e in with_redexes(ctx, t, lat):
        nf = normalize(ctx, e, lat)
        oracle = _expand(dict(ctx), naive_normal(e), t, set())
        checked.append(e)
        assert alpha_eq(oracle, nf), (show(e), show(oracle), show(nf))
    assert checked


def test_subject_reduction_up_to_erasure():
    lat = l4()
    for ctx in CTXS:
        erased = tuple((n, erase_monads(t)) for n, t in ctx)
        for t in [D, arrow(D, D), Monad("a", D), E]:
            for e in enumerate_terms(ctx, t, lat, 5):
                nf = normalize(ctx, e, lat)
                assert check_against(erased, nf, erase_monads(t), lat).type == erase_monads(t)


# ------------------------------------------------------------ semantics

def test_identity_denotes_curried_counit(lat):
    sigma = denote_term((), term(r"\x:E. x"), lat, 2, 8)
    expected = S.curry(weaken(S.counit(E, lat, 2, 8), I))
    assert sigma.game == expected.game and sigma.plays == expected.plays


def test_beta_eta_equal_terms_denote_alike(lat):
    ctx = (("f", arrow(E, E)),)
    a = denote_term(ctx, term("f"), lat)
    b = denote_term(ctx, term(r"(\g:E -> E. \y:E. g y) f"), lat)
    assert a.plays == b.plays


def test_example1_denotation_is_total():
    prog, lat = example1()
    d = typecheck(prog.assumptions, prog.directives[0].term, lat)
    sigma = denote(d, lat, 2, 8)
    assert S.is_total_bounded(sigma)
    assert all(not validate_play(sigma.view, s) for s in sigma.plays)


def test_noninterference_on_a_variable(lat):
    rep = non_interference_check((("x", E),), "x", Var("x"), E, lat)
    assert rep.free and rep.moves and not rep.rhd and rep.consistent


def test_noninterference_on_a_constant(lat):
    rep = non_interference_check((("x", E),), "x", Const(E, 0), E, lat)
    assert not rep.free and not rep.moves and rep.consistent


def test_incomparable_levels_admit_no_use(lat):
    a_t, b_t = Monad("a", D), Monad("b", E)
    ctx = (("x", a_t),)
    terms = enumerate_terms(ctx, b_t, lat, 8)
    assert terms
    assert all("x" not in free_vars(normalize(ctx, e, lat)) for e in terms)


def test_level_gap_hides_an_argument_from_the_semantics(lat):
    # f : [a]D -> D applied to x : D; the normal form uses x, but (p6) stops
    # O from opening f's argument (a is not below bot), so no move reaches x.
    ctx = (("x", E), ("f", arrow(Monad("a", E), E)))
    rep = non_interference_check(ctx, "x", term("f (eta<a> x)"), E, lat)
    assert rep.free and not rep.moves
