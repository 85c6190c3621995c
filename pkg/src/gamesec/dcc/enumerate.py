"""Type-directed enumeration of well-typed core DCC terms up to a size bound."""
from __future__ import annotations

import itertools

from ..errors import GamesecError
from ..flow import is_protected
from ..lattice import SecurityLattice
from ..types import Flat, GameType, Monad, as_arrow
from .terms import App, Bind, Const, EtaM, Lam, Term, Var, size
from .typing import dcc_norm, type_eq, typecheck


def _fresh(ctx, base):
    used = {n for n, _ in ctx}
    for i in itertools.count(1):
        name = f"{base}{i}"
        if name not in used:
            return name


def _spines(ctx, lat):
    """(head, argument types, result type) for every partial application of a variable."""
    for name, t in ctx:
        args = []
        cur = t
        yield name, tuple(args), cur
        while (ar := as_arrow(dcc_norm(cur, lat))) is not None:
            args.append(ar[0])
            cur = ar[1]
            yield name, tuple(args), cur


def _sized(n_args, budget):
    """Size vectors for n_args arguments summing to at most budget."""
    if n_args == 0:
        yield ()
        return
    for first in range(1, budget - n_args + 2):
        for rest in _sized(n_args - 1, budget - first):
            yield (first,) + rest


class TermEnumerator:
    def __init__(self, lat: SecurityLattice, constants: bool = True):
        self.lat = lat
        self.constants = constants
        self._memo: dict = {}

    def exact(self, ctx, t: GameType, n: int) -> list:
        """Terms of exactly size n and type t in ctx (modulo type equality)."""
        key = (ctx, dcc_norm(t, self.lat), n)
        if key not in self._memo:
            self._memo[key] = self._exact(ctx, t, n)
        return self._memo[key]

    def neutrals(self, ctx, n: int):
        """(term, type) for applications h M1 … Mk of size exactly n."""
        out = []
        for head, args, res in _spines(ctx, self.lat):
            if len(args) + 1 > n:
                continue
            if not args:
                if n == 1:
                    out.append((Var(head), res))
                continue
            # application nodes count: one per argument
            budget = n - 1 - len(args)
            for sizes in _sized(len(args), budget):
                if sum(sizes) != budget:
                    continue
                pools = [self.exact(ctx, a, s) for a, s in zip(args, sizes)]
                for combo in itertools.product(*pools):
                    e: Term = Var(head)
                    for m in combo:
                        e = App(e, m)
                    out.append((e, res))
        return out

    def _exact(self, ctx, t, n):
        lat = self.lat
        out = []
        if n <= 0:
            return out
        norm = dcc_norm(t, lat)
        ar = as_arrow(norm)
        if ar is not None:
            x = _fresh(ctx, "v")
            out += [Lam(x, ar[0], b) for b in self.exact(ctx + ((x, ar[0]),), ar[1], n - 1)]
        if isinstance(norm, Monad):
            out += [EtaM(norm.level, b) for b in self.exact(ctx, norm.body, n - 1)]
        if isinstance(norm, Flat) and self.constants and n == 1:
            out += [Const(norm, v) for v in range(norm.arity)]
        out += [e for e, ty in self.neutrals(ctx, n) if type_eq(ty, t, lat)]
        # bind y = N in body, with N a monadic neutral and t protected at its level
        for k in range(1, n - 1):
            for e, ty in self.neutrals(ctx, k):
                if not isinstance(ty, Monad) or not is_protected(t, ty.level, lat):
                    continue
                y = _fresh(ctx, "w")
                for body in self.exact(ctx + ((y, ty.body),), t, n - 1 - k):
                    out.append(Bind(y, e, body))
        return out

    def upto(self, ctx, t, max_size: int) -> list:
        ctx = tuple(ctx)
        return [e for n in range(1, max_size + 1) for e in self.exact(ctx, t, n)]


def enumerate_terms(ctx, t: GameType, lat: SecurityLattice, max_size: int, constants: bool = True) -> list:
    """Every term of size ≤ max_size built by the typing rules; each one re-typechecks."""
    out = []
    for e in TermEnumerator(lat, constants).upto(ctx, t, max_size):
        try:
            typecheck(ctx, e, lat)
        except GamesecError as exc:
            raise AssertionError(f"enumerated an ill-typed term: {exc}") from exc
        assert size(e) <= max_size
        out.append(e)
    return out
