"""Finite semantic domains of monotone relations.

A value of predicate type ``r1 -> ... -> rn -> o`` is stored uncurried, as
the antichain of its minimal true argument tuples.  The relation is true of a
tuple iff the tuple dominates (componentwise) one of the minimal ones, so
every stored value is monotone by construction and equal functions have
equal representations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import prod

from .core import show, term_key
from .errors import DomainOverflow, TypeMismatch
from .typesys import Arrow, Iota, O, Type, cached_hash, flatten

DEFAULT_DOMAIN_CAP = 1_000_000


@cached_hash
@dataclass(frozen=True)
class Individual:
    term: object


@dataclass(frozen=True)
class Truth:
    value: bool


FALSE = Truth(False)
TRUE = Truth(True)


@cached_hash
@dataclass(frozen=True)
class Rel:
    arg_types: tuple
    minimal_true: frozenset

    @property
    def type(self) -> Type:
        t = O()
        for a in reversed(self.arg_types):
            t = Arrow(a, t)
        return t


SemValue = "Individual | Truth | Rel"


def truth(b: bool) -> Truth:
    return TRUE if b else FALSE


def leq(v1, v2) -> bool:
    """The semantic order: discrete on individuals, false < true, pointwise on relations."""
    if v1 is v2:
        return True
    if isinstance(v1, Individual):
        if not isinstance(v2, Individual):
            raise TypeMismatch(f"cannot compare {v1} with {v2}")
        return v1 == v2
    if isinstance(v1, Truth):
        if not isinstance(v2, Truth):
            raise TypeMismatch(f"cannot compare {v1} with {v2}")
        return v1.value <= v2.value
    return _rel_leq(v1, v2)


@lru_cache(maxsize=1 << 20)
def _rel_leq(v1, v2) -> bool:
    if not isinstance(v2, Rel) or v1.arg_types != v2.arg_types:
        raise TypeMismatch(f"cannot compare values of different types")
    if v1 == v2:
        return True
    # upset(v1) is included in upset(v2)
    return all(any(tuple_leq(m2, m1) for m2 in v2.minimal_true) for m1 in v1.minimal_true)


def tuple_leq(t1, t2) -> bool:
    return all(leq(a, b) for a, b in zip(t1, t2))


def holds(rel: Rel, args) -> bool:
    """Whether the relation is true of a full argument tuple."""
    args = tuple(args)
    return any(tuple_leq(m, args) for m in rel.minimal_true)


def minimize(tuples) -> frozenset:
    """Minimal elements of a set of tuples (the canonical antichain)."""
    ts = list(set(tuples))
    return frozenset(t for t in ts
                     if not any(u != t and tuple_leq(u, t) for u in ts))


def canonical(rel: Rel) -> Rel:
    return Rel(rel.arg_types, minimize(rel.minimal_true))


@lru_cache(maxsize=1 << 20)
def apply(f, x):
    """Curried application: fix the first argument of ``f`` to ``x``."""
    if not isinstance(f, Rel) or not f.arg_types:
        raise TypeMismatch(f"cannot apply non-function value {f}")
    _check_type(x, f.arg_types[0])
    rest = f.arg_types[1:]
    matching = [t[1:] for t in f.minimal_true if leq(t[0], x)]
    if not rest:
        return truth(bool(matching))
    return Rel(rest, minimize(matching))


def _check_type(v, rho):
    ok = (isinstance(rho, Iota) and isinstance(v, Individual)
          or isinstance(rho, O) and isinstance(v, Truth)
          or isinstance(rho, Arrow) and isinstance(v, Rel) and v.arg_types == flatten(rho)[0])
    if not ok:
        raise TypeMismatch(f"value {show_value(v)} is not of type {rho}")


@lru_cache(maxsize=1 << 18)
def value_key(v):
    if isinstance(v, Individual):
        return (0, term_key(v.term))
    if isinstance(v, Truth):
        return (1, v.value)
    return (2, len(v.minimal_true), sorted(tuple(value_key(x) for x in t) for t in v.minimal_true))


def sorted_tuples(tuples) -> list:
    return sorted(tuples, key=lambda t: tuple(value_key(x) for x in t))


def show_value(v, shapes=None) -> str:
    if isinstance(v, Individual):
        return show(v.term, shapes)
    if isinstance(v, Truth):
        return "true" if v.value else "false"
    items = []
    for t in sorted_tuples(v.minimal_true):
        parts = [show_value(x, shapes) for x in t]
        items.append(parts[0] if len(parts) == 1 else "(" + ", ".join(parts) + ")")
    return "{" + ", ".join(items) + "}"


def value_to_json(v):
    if isinstance(v, Individual):
        return show(v.term)
    if isinstance(v, Truth):
        return v.value
    return {"minimal_true": [[value_to_json(x) for x in t] for t in sorted_tuples(v.minimal_true)]}


def _popcount(x: int) -> int:
    return bin(x).count("1")


class Product:
    """The componentwise-ordered product of argument domains.

    ``tuples`` is sorted by rank, which is a linear extension of the order.
    ``up[i]``/``down[i]`` are bitmasks over tuple indices.
    """

    def __init__(self, domains: "Domains", arg_types):
        self.arg_types = tuple(arg_types)
        comps = [domains.domain(t) for t in self.arg_types]
        size = prod(len(c.values) for c in comps)
        if size > domains.cap:
            raise DomainOverflow(Rel(self.arg_types, frozenset()).type, size,
                                 f"argument space {' x '.join(map(str, self.arg_types))} has {size} tuples")
        idx = list(itertools.product(*(range(len(c.values)) for c in comps)))
        rank = [sum(c.ranks[i] for c, i in zip(comps, ix)) for ix in idx]
        order = sorted(range(len(idx)), key=lambda j: (rank[j], idx[j]))
        self.index_tuples = [idx[j] for j in order]
        self.ranks = [rank[j] for j in order]
        self.tuples = [tuple(c.values[i] for c, i in zip(comps, ix)) for ix in self.index_tuples]
        self.position = {t: j for j, t in enumerate(self.tuples)}
        self._comps = comps
        self._up = None
        self._down = None

    def __len__(self):
        return len(self.tuples)

    def _build_masks(self):
        n = len(self.tuples)
        comp_up = [c.up_masks() for c in self._comps]
        up = [0] * n
        down = [0] * n
        for i, ti in enumerate(self.index_tuples):
            for j in range(i, n):
                tj = self.index_tuples[j]
                if all((cu[a] >> b) & 1 for cu, a, b in zip(comp_up, ti, tj)):
                    up[i] |= 1 << j
                    down[j] |= 1 << i
        self._up, self._down = up, down

    @property
    def up(self):
        if self._up is None:
            self._build_masks()
        return self._up

    @property
    def down(self):
        if self._down is None:
            self._build_masks()
        return self._down

    def upset_mask(self, rel: Rel) -> int:
        m = 0
        for t in rel.minimal_true:
            m |= self.up[self.position[t]]
        return m

    def rel_from_mask(self, mask: int) -> Rel:
        """The relation whose true tuples are given by an upward-closed mask."""
        mins = []
        for j in range(len(self.tuples)):
            if (mask >> j) & 1 and not (self.down[j] & ~(1 << j) & mask):
                mins.append(self.tuples[j])
        return Rel(self.arg_types, frozenset(mins))

    def minimal_elements(self) -> list:
        return [self.tuples[j] for j in range(len(self.tuples))
                if not (self.down[j] & ~(1 << j))]


class Domain:
    """An enumerated domain: values sorted by rank (a linear extension)."""

    def __init__(self, rho: Type, values, ranks):
        self.type = rho
        self.values = tuple(values)
        self.ranks = tuple(ranks)
        self.index = {v: i for i, v in enumerate(self.values)}
        self._up = None

    def __len__(self):
        return len(self.values)

    def up_masks(self):
        """``up[i]`` has bit ``j`` set iff values[i] <= values[j]."""
        if self._up is None:
            n = len(self.values)
            self._up = [0] * n
            for i in range(n):
                for j in range(i, n):
                    if leq(self.values[i], self.values[j]):
                        self._up[i] |= 1 << j
        return self._up


class Domains:
    """Enumerates the domains of every argument and predicate type over a
    fixed finite set of individuals."""

    def __init__(self, individuals, cap: int = DEFAULT_DOMAIN_CAP):
        self.individuals = tuple(individuals)
        self.cap = cap
        self._domains = {}
        self._products = {}

    def product(self, arg_types) -> Product:
        key = tuple(arg_types)
        if key not in self._products:
            self._products[key] = Product(self, key)
        return self._products[key]

    def domain(self, rho: Type) -> Domain:
        if rho in self._domains:
            return self._domains[rho]
        if isinstance(rho, Iota):
            vals = [Individual(t) for t in sorted(self.individuals, key=term_key)]
            d = Domain(rho, vals, [0] * len(vals))
        elif isinstance(rho, O):
            d = Domain(rho, [FALSE, TRUE], [0, 1])
        else:
            d = self._relations(rho)
        self._domains[rho] = d
        return d

    def enumerate(self, rho: Type) -> tuple:
        return self.domain(rho).values

    def _relations(self, rho: Type) -> Domain:
        arg_types, _ = flatten(rho)
        prod_ = self.product(arg_types)
        n = len(prod_)
        # tuples of equal rank are pairwise incomparable, so 2**(largest
        # rank level) antichains exist at least
        widest = max((prod_.ranks.count(r) for r in set(prod_.ranks)), default=0)
        if widest >= 63 or 2 ** widest > self.cap:
            raise DomainOverflow(rho, 2 ** min(widest, 63))
        comp = [prod_.up[i] | prod_.down[i] for i in range(n)]
        found = []
        stack = [(0, 0, 0)]
        while stack:
            start, chosen, forbidden = stack.pop()
            found.append(chosen)
            if len(found) > self.cap:
                raise DomainOverflow(rho, len(found))
            for j in range(start, n):
                if not (forbidden >> j) & 1:
                    stack.append((j + 1, chosen | (1 << j), forbidden | comp[j]))
        vals = []
        for mask in found:
            mins = frozenset(prod_.tuples[j] for j in range(n) if (mask >> j) & 1)
            up = 0
            for j in range(n):
                if (mask >> j) & 1:
                    up |= prod_.up[j]
            vals.append((_popcount(up), Rel(arg_types, mins)))
        vals.sort(key=lambda rv: (rv[0], value_key(rv[1])))
        return Domain(rho, [v for _, v in vals], [r for r, _ in vals])

    def bottom(self, rho: Type):
        if isinstance(rho, O):
            return FALSE
        if isinstance(rho, Arrow):
            return Rel(flatten(rho)[0], frozenset())
        raise TypeMismatch("the individual domain has no least element")

    def top(self, rho: Type):
        if isinstance(rho, O):
            return TRUE
        if isinstance(rho, Arrow):
            args = flatten(rho)[0]
            mins = [self._minimal(a) for a in args]
            return Rel(args, frozenset(itertools.product(*mins)))
        raise TypeMismatch("the individual domain has no greatest element")

    def _minimal(self, rho: Type) -> list:
        if isinstance(rho, Iota):
            return list(self.domain(rho).values)
        return [self.bottom(rho)]

    def hasse(self, rho: Type) -> dict:
        """Covering relation of a domain, for inspection."""
        d = self.domain(rho)
        up = d.up_masks()
        n = len(d.values)
        edges = []
        for i in range(n):
            above = up[i] & ~(1 << i)
            for j in range(n):
                if (above >> j) & 1:
                    between = above & ~(1 << j)
                    if not any((between >> m) & 1 and (up[m] >> j) & 1 for m in range(n)):
                        edges.append([i, j])
        return {"type": str(rho), "nodes": [show_value(v) for v in d.values], "edges": edges}


def enumerate_domain(rho: Type, individuals, cap: int = DEFAULT_DOMAIN_CAP) -> tuple:
    return Domains(individuals, cap).enumerate(rho)
