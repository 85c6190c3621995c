"""Type checking for core DCC with protected-type evidence on every bind."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import DCCTypeError, ProtectionError
from ..flow import is_protected, level_of_type
from ..lattice import SecurityLattice
from ..types import Flat, GameType, Monad, arrow, as_arrow, check_levels, to_text
from .terms import App, Bind, Const, EtaM, Lam, Term, Var, show


def is_core_type(t: GameType) -> bool:
    if isinstance(t, Flat):
        return True
    if isinstance(t, Monad):
        return is_core_type(t.body)
    ar = as_arrow(t)
    return ar is not None and is_core_type(ar[0]) and is_core_type(ar[1])


def dcc_norm(t: GameType, lat: SecurityLattice) -> GameType:
    """Type equality: nested monads merge and bottom monads vanish."""
    if isinstance(t, Flat):
        return t
    if isinstance(t, Monad):
        lv, body = t.level, t.body
        while isinstance(body, Monad):
            lv, body = lat.join(lv, body.level), body.body
        inner = dcc_norm(body, lat)
        return inner if lv == lat.bottom else Monad(lv, inner)
    a, b = as_arrow(t)
    return arrow(dcc_norm(a, lat), dcc_norm(b, lat))


def type_eq(s: GameType, t: GameType, lat: SecurityLattice) -> bool:
    return dcc_norm(s, lat) == dcc_norm(t, lat)


def outer_monad(t: GameType, lat: SecurityLattice):
    """(level, body) when t is written [l]A, merging directly nested monads."""
    if not isinstance(t, Monad):
        return None
    return t.level, t.body


@dataclass
class Derivation:
    ctx: tuple  # ((name, type), ...)
    term: Term
    type: GameType
    rule: str
    premises: list = field(default_factory=list)
    side: list = field(default_factory=list)

    def conclusion(self) -> str:
        ctx = ", ".join(f"{n}:{to_text(t)}" for n, t in self.ctx)
        return f"{ctx} ⊢ {show(self.term)} : {to_text(self.type)}"

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()

    def as_dict(self):
        out = {"rule": self.rule, "term": show(self.term), "type": to_text(self.type)}
        if self.side:
            out["side_conditions"] = self.side
        if self.premises:
            out["premises"] = [p.as_dict() for p in self.premises]
        return out


def typecheck(ctx, e: Term, lat: SecurityLattice) -> Derivation:
    """Derive ``ctx ⊢ e : T``; ctx is a sequence of (name, type)."""
    ctx = tuple(ctx)
    names = [n for n, _ in ctx]
    if len(set(names)) != len(names):
        raise DCCTypeError("context names must be distinct", "context")
    for n, t in ctx:
        check_levels(t, lat)
        if not is_core_type(t):
            raise DCCTypeError(f"{n} : {to_text(t)} is not a core type", "context")
    return _infer(ctx, e, lat)


def _lookup(ctx, name):
    for n, t in reversed(ctx):
        if n == name:
            return t
    return None


def _extend(ctx, name, t):
    return tuple((n, s) for n, s in ctx if n != name) + ((name, t),)


def _infer(ctx, e, lat) -> Derivation:
    if isinstance(e, Var):
        t = _lookup(ctx, e.name)
        if t is None:
            raise DCCTypeError(f"unbound variable {e.name!r}", "var")
        return Derivation(ctx, e, t, "var")
    if isinstance(e, Const):
        return Derivation(ctx, e, e.base, "const")
    if isinstance(e, Lam):
        check_levels(e.ann, lat)
        if not is_core_type(e.ann):
            raise DCCTypeError(f"annotation {to_text(e.ann)} is not a core type", "lam")
        body = _infer(_extend(ctx, e.name, e.ann), e.body, lat)
        return Derivation(ctx, e, arrow(e.ann, body.type), "lam", [body])
    if isinstance(e, App):
        f = _infer(ctx, e.fn, lat)
        a = _infer(ctx, e.arg, lat)
        ar = as_arrow(dcc_norm(f.type, lat))
        if ar is None:
            raise DCCTypeError(f"applying {show(e.fn)} of non-function type {to_text(f.type)}", "app")
        if not type_eq(ar[0], a.type, lat):
            raise DCCTypeError(f"argument {show(e.arg)} has type {to_text(a.type)}, expected {to_text(ar[0])}",
                               "app")
        return Derivation(ctx, e, ar[1], "app", [f, a])
    if isinstance(e, EtaM):
        lat.check(e.level)
        body = _infer(ctx, e.body, lat)
        return Derivation(ctx, e, Monad(e.level, body.type), "unit", [body])
    if isinstance(e, Bind):
        b = _infer(ctx, e.bound, lat)
        om = outer_monad(b.type, lat)
        if om is None:
            raise DCCTypeError(f"bind over {show(e.bound)} of non-monadic type {to_text(b.type)}", "bind")
        lv, inner = om
        body = _infer(_extend(ctx, e.name, inner), e.body, lat)
        levels = sorted(level_of_type(body.type, lat))
        if not is_protected(body.type, lv, lat):
            low = [x for x in levels if not lat.leq(lv, x)]
            raise ProtectionError(
                f"bind {e.name}: body type {to_text(body.type)} is not protected at {lv} "
                f"(needs {lv} ≤ {', '.join(low)})", required=lv, found=low[0])
        side = [{"condition": "protected", "type": to_text(body.type), "level": lv, "evidence": levels}]
        return Derivation(ctx, e, body.type, "bind", [b, body], side)
    raise TypeError(e)


def check_against(ctx, e: Term, t: GameType, lat: SecurityLattice) -> Derivation:
    d = typecheck(ctx, e, lat)
    if not type_eq(d.type, t, lat):
        raise DCCTypeError(f"{show(e)} has type {to_text(d.type)}, expected {to_text(t)}", "check")
    return d
