"""Game semantics of core DCC terms.

A term ``Γ ⊢ e : T`` denotes a strategy on ``!T1 ⊗ (… ⊗ (!Tn ⊗ I)) -o T``.
The strategy is computed from the long normal form by an innocent
abstract machine: an O-question that calls a subterm ``λys. h M1 … Mm`` is
answered by opening a fresh copy of the head ``h``; O-answers to that copy
are passed back to the calling question; O-questions in an argument of the
head call the matching ``Mj``.  The machine yields a skeleton, which is then
saturated.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import DCCTypeError
from ..flow import moves_in_component, rhd
from ..games import extension_ok, extensions, view
from ..lattice import SecurityLattice
from ..strategy import Strategy, saturate
from ..types import Bang, Flat, GameType, I, Limp, Monad, Tensor, as_arrow, to_text
from .normalize import normal_form
from .terms import App, Const, Lam, Term, Var, free_vars, show
from .typing import Derivation, check_against, typecheck


def _strip(t):
    while isinstance(t, Monad):
        t = t.body
    return t


def spine(t: GameType):
    """Argument types and result flat of an arena, looking through monads."""
    args = []
    t = _strip(t)
    while (ar := as_arrow(t)) is not None:
        args.append(ar[0])
        t = _strip(ar[1])
    if not isinstance(t, Flat):
        raise DCCTypeError(f"{to_text(t)} is not a core type", "denote")
    return args, t


def _wrap_b(m, n):
    for _ in range(n):
        m = ("B", m)
    return m


def qtag(r):
    return _wrap_b(("q",), r)


def atag(r, v):
    return _wrap_b(("a", v), r)


def arg_tag(r, k, i, m):
    """Move m of copy i of argument k (1-based) in an arena with r arguments."""
    return _wrap_b(("A", qtag(r - k), ("!", i, m)), k - 1)


def ctx_game(ctx) -> GameType:
    out = I
    for _, t in reversed(tuple(ctx)):
        out = Tensor(Bang(t), out)
    return out


def _ctx_wrap(j, m):
    m = ("L", m)
    for _ in range(j):
        m = ("R", m)
    return m


def _unspine(e: Term):
    args = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fn
    return e, args[::-1]


@dataclass
class _State:
    calls: dict
    answer_to: dict

    def copy(self):
        return _State(dict(self.calls), dict(self.answer_to))


class Machine:
    def __init__(self, ctx, nf: Term, t: GameType, lat: SecurityLattice, k: int):
        self.ctx = tuple(ctx)
        self.k = k
        self.game = Limp(ctx_game(self.ctx), t)
        self.view = view(self.game, lat, k)
        r = len(spine(t)[0])
        b0 = qtag(r)
        self.env0 = {}
        for j, (name, ty) in enumerate(self.ctx):
            self.env0[name] = (lambda i, m, j=j: ("A", b0, _ctx_wrap(j, ("!", i, m))), ty)
        self.start = _State({("B", b0): (nf, self.env0, lambda m: ("B", m), t)}, {})

    def respond(self, state: _State, s, a):
        """P's move after s·a and the updated state, or None."""
        played = set(s) | {a}
        if a in state.calls:
            return self._call(state, played, a)
        j = self.view.info[a].justifier
        if _leaf(a)[0] == "a" and j in state.answer_to:
            q = state.answer_to[j]
            return _replace_leaf(q, _leaf(a)), state
        return None

    def _call(self, state, played, a):
        nf, env, loc, arena = state.calls[a]
        args, _ = spine(arena)
        r = len(args)
        env = dict(env)
        body = nf
        for k in range(1, r + 1):
            if not isinstance(body, Lam):
                raise DCCTypeError(f"{show(nf)} is not η-long at {to_text(arena)}", "denote")
            env[body.name] = (lambda i, m, k=k: loc(arg_tag(r, k, i, m)), args[k - 1])
            body = body.body
        if isinstance(body, Const):
            return loc(atag(r, body.value)), state
        head, margs = _unspine(body)
        if not isinstance(head, Var) or head.name not in env:
            raise DCCTypeError(f"unexpected head in normal form {show(body)}", "denote")
        locfn, htype = env[head.name]
        hargs, _ = spine(htype)
        rh = len(hargs)
        for i in range(self.k):
            q = locfn(i, qtag(rh))
            if q not in played:
                break
        else:
            return None
        new = state.copy()
        new.answer_to[q] = a
        for j, m in enumerate(margs, 1):
            cj = hargs[j - 1]
            rj = len(spine(cj)[0])
            for i2 in range(self.k):
                lj = (lambda mm, i=i, j=j, i2=i2: locfn(i, arg_tag(rh, j, i2, mm)))
                new.calls[lj(qtag(rj))] = (m, env, lj, cj)
        return q, new


def _leaf(m):
    while m and m[0] in ("A", "B", "L", "R", "!"):
        m = m[-1]
    return m


def _replace_leaf(m, leaf):
    if m and m[0] in ("A", "B", "L", "R", "!"):
        return m[:-1] + (_replace_leaf(m[-1], leaf),)
    return leaf


def denote_normal(ctx, nf: Term, t: GameType, lat: SecurityLattice, k: int = 2, max_len: int = 8) -> Strategy:
    mach = Machine(ctx, nf, t, lat, k)
    v = mach.view
    phi = {()}
    frontier = [((), mach.start)]
    while frontier:
        nxt = []
        for s, state in frontier:
            if len(s) + 2 > max_len:
                continue
            for a in extensions(v, s):
                res = mach.respond(state, s, a)
                if res is None:
                    continue
                b, st2 = res
                if b not in v.info or not extension_ok(v, s + (a,), b):
                    continue
                sab = s + (a, b)
                phi.add(sab)
                nxt.append((sab, st2))
        frontier = nxt
    return saturate(Strategy(mach.game, lat, k, max_len, frozenset(phi)))


def denote(d: Derivation, lat: SecurityLattice, k: int = 2, max_len: int = 8) -> Strategy:
    """The strategy of a derivation on ``!Γ -o T`` (via its long normal form)."""
    nf = normal_form(d.ctx, d.term, d.type)
    return denote_normal(d.ctx, nf, d.type, lat, k, max_len)


def denote_term(ctx, e: Term, lat: SecurityLattice, k: int = 2, max_len: int = 8) -> Strategy:
    return denote(typecheck(ctx, e, lat), lat, k, max_len)


@dataclass
class NonInterferenceReport:
    var: str
    var_type: GameType
    result_type: GameType
    normal_form: Term
    free: bool
    moves: bool
    rhd: bool
    bounds: dict

    @property
    def consistent(self) -> bool:
        """Freeness agrees with semantic movement, and ⊳ rules out use."""
        return self.free == self.moves and not (self.rhd and self.free)

    def as_dict(self):
        return {"variable": self.var, "variable_type": to_text(self.var_type),
                "result_type": to_text(self.result_type), "normal_form": show(self.normal_form),
                "free_in_normal_form": self.free, "moves_in_variable": self.moves,
                "rhd": self.rhd, "bounds": self.bounds,
                "free_iff_moves": self.free == self.moves,
                "rhd_implies_unused": not (self.rhd and self.free)}


def non_interference_check(ctx, x: str, e: Term, t: GameType | None, lat: SecurityLattice,
                           k: int = 2, max_len: int = 8) -> NonInterferenceReport:
    ctx = tuple(ctx)
    if x not in [n for n, _ in ctx]:
        raise DCCTypeError(f"{x} is not in the context", "noninterference")
    d = check_against(ctx, e, t, lat) if t is not None else typecheck(ctx, e, lat)
    a = dict(ctx)[x]
    ordered = ((x, a),) + tuple((n, ty) for n, ty in ctx if n != x)
    nf = normal_form(ordered, e, d.type)
    sigma = denote_normal(ordered, nf, d.type, lat, k, max_len)
    moves, _ = moves_in_component(sigma, "A")
    return NonInterferenceReport(x, a, d.type, nf, x in free_vars(nf), moves, rhd(a, d.type, lat),
                                 {"copy_bound": k, "max_len": max_len})
