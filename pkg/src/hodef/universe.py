"""Depth-bounded Herbrand universes and the ground instantiation of a program."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

from .core import App, Const, FunApp, Program, depth, substitute, term_key
from .errors import UniverseOverflow
from .typesys import IOTA, OMICRON, Arrow, Iota, Type

DEFAULT_UNIVERSE_CAP = 100_000
DEFAULT_CLAUSE_CAP = 1_000_000


def _suffix_types(t: Type):
    while isinstance(t, Arrow):
        yield t
        t = t.result
    yield t


class ActiveUniverse:
    """Ground terms of every type up to a depth bound ``k``.

    Depth counts function-symbol nesting and predicate application nesting
    uniformly, so ``f(f(a))`` and ``id(id(q))`` both have depth 2.
    """

    def __init__(self, program: Program, k: int, cap: int = DEFAULT_UNIVERSE_CAP):
        if k < 0:
            raise ValueError("depth bound must be non-negative")
        self.program = program
        self.k = k
        self.cap = cap
        sig = program.signature
        self._consts = {}
        for c in sig.individuals:
            self._consts.setdefault(IOTA, []).append(Const(c, IOTA))
        for p, t in sig.predicates.items():
            self._consts.setdefault(t, []).append(Const(p, t))
        self._producers = {}
        for t in set(sig.predicates.values()):
            for s in _suffix_types(t):
                if isinstance(s, Arrow):
                    self._producers.setdefault(s.result, set()).add(s)
        for t in self._producers:
            self._producers[t] = sorted(self._producers[t], key=str)
        self._levels = {}
        self._terms = {}
        self._count = 0

    def _level(self, d: int, t: Type) -> list:
        """Terms of type ``t`` with depth exactly ``d``."""
        key = (d, t)
        if key in self._levels:
            return self._levels[key]
        if d == 0:
            out = list(self._consts.get(t, ()))
        else:
            out = []
            if isinstance(t, Iota):
                for f, n in sorted(self.program.signature.functions.items()):
                    below = self._upto(d - 1, IOTA)
                    for args in itertools.product(below, repeat=n):
                        if max(depth(a) for a in args) == d - 1:
                            out.append(FunApp(f, args))
                            self._tick(out)
            for arrow in self._producers.get(t, ()):
                funs = self._upto(d - 1, arrow)
                if not funs:
                    continue
                args = self._upto(d - 1, arrow.arg)
                for f in funs:
                    for a in args:
                        if max(depth(f), depth(a)) == d - 1:
                            out.append(App(f, a))
                            self._tick(out)
        self._levels[key] = out
        return out

    def _tick(self, out):
        self._count += 1
        if self._count > self.cap:
            raise UniverseOverflow(f"more than {self.cap} ground terms at depth bound {self.k}")

    def _upto(self, d: int, t: Type) -> list:
        return [e for i in range(d + 1) for e in self._level(i, t)]

    def terms(self, rho: Type) -> list:
        """U_rho restricted to depth <= k, in canonical order."""
        if rho not in self._terms:
            self._terms[rho] = sorted(self._upto(self.k, rho), key=term_key)
        return self._terms[rho]

    def atoms(self) -> list:
        """Ground atoms whose constituents have depth <= k (see ``atom_depth``)."""
        if "atoms" not in self._terms:
            self._terms["atoms"] = sorted(self._upto(self.k + 1, OMICRON), key=term_key)
        return self._terms["atoms"]

    def predicate_types(self):
        return {t for t in self._consts if not isinstance(t, Iota)}


def enumerate_universe(p: Program, rho: Type, k: int, cap: int = DEFAULT_UNIVERSE_CAP) -> list:
    return ActiveUniverse(p, k, cap).terms(rho)


@dataclass(frozen=True)
class GroundClause:
    head: object
    body: tuple

    def key(self):
        return (term_key(self.head), tuple(term_key(b) for b in self.body))


def instantiate(clause, theta) -> GroundClause:
    return GroundClause(substitute(clause.head, theta),
                        tuple(substitute(b, theta) for b in clause.body))


def ground_instantiation(p: Program, k: int, *, universe: ActiveUniverse = None,
                         cap: int = DEFAULT_CLAUSE_CAP) -> list:
    """All ground instances of the clauses of ``p`` over the depth-``k`` universe.

    Every variable is grounded, including predicate-variable heads and extra
    body predicate variables.  The result is deduplicated and sorted.
    """
    u = universe or ActiveUniverse(p, k)
    seen = set()
    total = 0
    for c in p.clauses:
        vs = c.all_vars()
        pools = [u.terms(v.type) for v in vs]
        total += prod(len(x) for x in pools)
        if total > cap:
            raise UniverseOverflow(f"ground instantiation exceeds {cap} clauses at depth {k}")
        for values in itertools.product(*pools):
            seen.add(instantiate(c, {v.name: t for v, t in zip(vs, values)}))
    return sorted(seen, key=GroundClause.key)


def show_ground_clause(p: Program, gc: GroundClause) -> str:
    return p.show_clause((gc.head, gc.body))
