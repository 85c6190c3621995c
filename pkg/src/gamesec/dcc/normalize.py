"""Normalization by evaluation to long βη-normal form.

Monad redexes reduce away (``eta<l> e`` to ``e`` and ``bind x = e in e'`` to
``e'[e/x]``), so evaluation erases monads and normal forms are those of the
underlying simply-typed λ-calculus.
"""
from __future__ import annotations

import itertools

from ..lattice import SecurityLattice
from ..types import Flat, GameType, Monad, arrow, as_arrow
from .terms import App, Bind, Const, EtaM, Lam, Term, Var
from .typing import typecheck


def erase_monads(t: GameType) -> GameType:
    while isinstance(t, Monad):
        t = t.body
    if isinstance(t, Flat):
        return t
    a, b = as_arrow(t)
    return arrow(erase_monads(a), erase_monads(b))


class _Names:
    def __init__(self, avoid):
        self.avoid = set(avoid)
        self.counter = itertools.count(1)

    def fresh(self, hint: str) -> str:
        base = hint.rstrip("0123456789'") or "y"
        if base not in self.avoid:
            self.avoid.add(base)
            return base
        while True:
            name = f"{base}{next(self.counter)}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name


class _Fn:
    """Semantic function value carrying the binder name it came from."""

    def __init__(self, hint, fn):
        self.hint, self.fn = hint, fn

    def __call__(self, v):
        return self.fn(v)


def _eval(e: Term, env: dict):
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Const):
        return e
    if isinstance(e, Lam):
        return _Fn(e.name, lambda v, e=e: _eval(e.body, {**env, e.name: v}))
    if isinstance(e, App):
        return _eval(e.fn, env)(_eval(e.arg, env))
    if isinstance(e, EtaM):
        return _eval(e.body, env)
    if isinstance(e, Bind):
        return _eval(e.body, {**env, e.name: _eval(e.bound, env)})
    raise TypeError(e)


def _reflect(t: GameType, neutral: Term, names: _Names):
    ar = as_arrow(t)
    if ar is None:
        return neutral
    a, b = ar
    return _Fn("y", lambda v: _reflect(b, App(neutral, _reify(a, v, names)), names))


def _reify(t: GameType, v, names: _Names) -> Term:
    ar = as_arrow(t)
    if ar is None:
        return v
    a, b = ar
    x = names.fresh(getattr(v, "hint", "y"))
    return Lam(x, a, _reify(b, v(_reflect(a, Var(x), names)), names))


def normalize(ctx, e: Term, lat: SecurityLattice) -> Term:
    """Long βη-normal form of a well-typed term (types erased of monads)."""
    d = typecheck(ctx, e, lat)
    return normal_form(ctx, e, d.type)


def normal_form(ctx, e: Term, t: GameType) -> Term:
    ctx = tuple(ctx)
    names = _Names(n for n, _ in ctx)
    env = {n: _reflect(erase_monads(ty), Var(n), names) for n, ty in ctx}
    return _reify(erase_monads(t), _eval(e, env), names)
