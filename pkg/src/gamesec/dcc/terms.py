"""Core DCC terms: simply-typed λ with level-monad unit and bind."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..types import Flat, GameType, to_text


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lam:
    name: str
    ann: GameType
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class EtaM:
    level: str
    body: "Term"


@dataclass(frozen=True)
class Bind:
    name: str
    bound: "Term"
    body: "Term"


@dataclass(frozen=True)
class Const:
    base: Flat
    value: int


Term = Union[Var, Lam, App, EtaM, Bind, Const]


def free_vars(e: Term) -> frozenset:
    if isinstance(e, Var):
        return frozenset({e.name})
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Lam):
        return free_vars(e.body) - {e.name}
    if isinstance(e, App):
        return free_vars(e.fn) | free_vars(e.arg)
    if isinstance(e, EtaM):
        return free_vars(e.body)
    if isinstance(e, Bind):
        return free_vars(e.bound) | (free_vars(e.body) - {e.name})
    raise TypeError(e)


def fresh(base: str, avoid) -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def subst(e: Term, x: str, s: Term) -> Term:
    """Capture-avoiding e[s/x]."""
    if isinstance(e, Var):
        return s if e.name == x else e
    if isinstance(e, Const):
        return e
    if isinstance(e, App):
        return App(subst(e.fn, x, s), subst(e.arg, x, s))
    if isinstance(e, EtaM):
        return EtaM(e.level, subst(e.body, x, s))
    if isinstance(e, Lam):
        if e.name == x:
            return e
        name, body = _avoid(e.name, e.body, s)
        return Lam(name, e.ann, subst(body, x, s))
    if isinstance(e, Bind):
        bound = subst(e.bound, x, s)
        if e.name == x:
            return Bind(e.name, bound, e.body)
        name, body = _avoid(e.name, e.body, s)
        return Bind(name, bound, subst(body, x, s))
    raise TypeError(e)


def _avoid(name, body, s):
    fv = free_vars(s)
    if name not in fv:
        return name, body
    new = fresh(name, fv | free_vars(body))
    return new, subst(body, name, Var(new))


def size(e: Term) -> int:
    if isinstance(e, (Var, Const)):
        return 1
    if isinstance(e, (Lam, EtaM)):
        return 1 + size(e.body)
    if isinstance(e, App):
        return 1 + size(e.fn) + size(e.arg)
    return 1 + size(e.bound) + size(e.body)


def show(e: Term, prec: int = 0) -> str:
    """Concrete syntax accepted by the term parser."""
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return f"{e.base.name}#{e.value}"
    if isinstance(e, App):
        out = f"{show(e.fn, 1)} {show(e.arg, 2)}"
        return f"({out})" if prec > 1 else out
    if isinstance(e, Lam):
        out = f"\\{e.name}:{to_text(e.ann)}. {show(e.body)}"
    elif isinstance(e, EtaM):
        out = f"eta<{e.level}> {show(e.body, 2)}"
    else:
        out = f"bind {e.name} = {show(e.bound)} in {show(e.body)}"
    return f"({out})" if prec > 0 else out
