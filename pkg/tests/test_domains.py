import itertools

import pytest
from hypothesis import given, settings, strategies as st

from hodef.core import Const
from hodef.domains import (
    FALSE, TRUE, Domains, Individual, Rel, apply, enumerate_domain, holds, leq, show_value,
)
from hodef.errors import DomainOverflow, TypeMismatch
from hodef.parser import parse_type
from hodef.typesys import IOTA, OMICRON, Arrow


def consts(n):
    return [Const(c, IOTA) for c in "abcd"[:n]]


# Brute-force oracle: a value of type r -> p is a table over the carrier of
# r, kept only when it is monotone.  Nothing here shares code with domains.

def carrier(t, n):
    if t == IOTA:
        return [("i", j) for j in range(n)], lambda x, y: x == y
    if t == OMICRON:
        return [False, True], lambda x, y: x <= y
    dom, dle = carrier(t.arg, n)
    cod, cle = carrier(t.result, n)
    tables = []
    for table in itertools.product(cod, repeat=len(dom)):
        if all(cle(table[i], table[j]) for i in range(len(dom)) for j in range(len(dom))
               if dle(dom[i], dom[j])):
            tables.append(table)
    return tables, lambda f, g: all(cle(x, y) for x, y in zip(f, g))


@pytest.mark.parametrize("text, n, size", [
    ("i -> o", 1, 2), ("i -> o", 3, 8),
    ("(i -> o) -> o", 1, 3), ("(i -> o) -> o", 2, 6), ("(i -> o) -> o", 3, 20),
    ("o -> o", 0, 3), ("o -> o -> o", 0, 6), ("i -> i -> o", 2, 16),
    ("(i -> o) -> i -> o", 2, 36), ("((i -> o) -> o) -> o", 1, 4),
])
def test_sizes_match_oracle(text, n, size):
    t = parse_type(text)
    assert len(enumerate_domain(t, consts(n))) == size
    assert len(carrier(t, n)[0]) == size


@pytest.mark.parametrize("text, n", [("(i -> o) -> o", 2), ("(i -> o) -> i -> o", 2), ("o -> o -> o", 1)])
def test_values_match_oracle(text, n):
    """Tabulating every enumerated value gives exactly the oracle's tables."""
    t = parse_type(text)
    doms = Domains(consts(n))

    def oracle_value(v, ty):
        if ty == IOTA:
            return ("i", [x.term for x in doms.enumerate(IOTA)].index(v.term))
        if ty == OMICRON:
            return v.value
        return tuple(oracle_value(x, ty.result) for x in table_args(v, ty))

    def table_args(v, ty):
        return [apply(v, d) for d in doms.enumerate(ty.arg)]

    mine = {oracle_value(v, t) for v in doms.enumerate(t)}
    dom_order = [oracle_value(d, t.arg) for d in doms.enumerate(t.arg)]
    ref_dom, _ = carrier(t.arg, n)
    perm = [ref_dom.index(x) for x in dom_order]
    ref = {tuple(tab[j] for j in perm) for tab in carrier(t, n)[0]}
    assert mine == ref


def test_sizes_over_four_constants():
    assert len(enumerate_domain(parse_type("(i -> o) -> o"), consts(4))) == 168


def test_order_axioms():
    for text in ["(i -> o) -> o", "o -> o -> o", "(i -> o) -> i -> o"]:
        vals = Domains(consts(2)).enumerate(parse_type(text))
        for x in vals:
            assert leq(x, x)
        for x, y in itertools.product(vals, repeat=2):
            if leq(x, y) and leq(y, x):
                assert x == y
        for x, y, z in itertools.product(vals[:12], repeat=3):
            if leq(x, y) and leq(y, z):
                assert leq(x, z)


def test_enumeration_is_a_linear_extension():
    vals = Domains(consts(3)).enumerate(parse_type("(i -> o) -> o"))
    for i, j in itertools.combinations(range(len(vals)), 2):
        assert not (leq(vals[j], vals[i]) and vals[i] != vals[j])


def test_bottom_and_top():
    doms = Domains(consts(2))
    t = parse_type("(i -> o) -> i -> o")
    vals = doms.enumerate(t)
    assert vals[0] == doms.bottom(t) and vals[-1] == doms.top(t)
    assert all(leq(doms.bottom(t), v) and leq(v, doms.top(t)) for v in vals)
    assert show_value(doms.top(t)) == "{({}, a), ({}, b)}"
    with pytest.raises(TypeMismatch):
        doms.bottom(IOTA)


def test_apply_examples():
    a, b = (Individual(c) for c in consts(2))
    io = Arrow(IOTA, OMICRON)
    doms = Domains(consts(2))
    p = Rel((io,), frozenset({(Rel((IOTA,), frozenset({(a,)})),)}))
    assert apply(p, Rel((IOTA,), frozenset({(a,)}))) == TRUE
    assert apply(p, Rel((IOTA,), frozenset({(a,), (b,)}))) == TRUE
    assert apply(p, Rel((IOTA,), frozenset({(b,)}))) == FALSE
    ident = Rel((io, IOTA), frozenset({(Rel((IOTA,), frozenset({(a,)})), a),
                                       (Rel((IOTA,), frozenset({(b,)})), b)}))
    only_b = Rel((IOTA,), frozenset({(b,)}))
    assert apply(apply(ident, only_b), a) == FALSE
    assert apply(apply(ident, only_b), b) == TRUE
    with pytest.raises(TypeMismatch):
        apply(p, a)
    assert len(doms.enumerate(io)) == 4


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_apply_is_monotone_in_both_arguments(data):
    doms = Domains(consts(2))
    fs = doms.enumerate(Arrow(Arrow(IOTA, OMICRON), OMICRON))
    xs = doms.enumerate(Arrow(IOTA, OMICRON))
    f, g = data.draw(st.sampled_from(fs)), data.draw(st.sampled_from(fs))
    x, y = data.draw(st.sampled_from(xs)), data.draw(st.sampled_from(xs))
    if leq(f, g):
        assert leq(apply(f, x), apply(g, x))
    if leq(x, y):
        assert leq(apply(f, x), apply(f, y))


def test_holds_is_upward_closed():
    doms = Domains(consts(2))
    t = parse_type("(i -> o) -> i -> o")
    prod = doms.product((Arrow(IOTA, OMICRON), IOTA))
    for v in doms.enumerate(t):
        true = [x for x in prod.tuples if holds(v, x)]
        for x in true:
            for y in prod.tuples:
                if all(leq(a, b) for a, b in zip(x, y)):
                    assert holds(v, y)


def test_overflow():
    with pytest.raises(DomainOverflow):
        Domains(consts(4), cap=10_000).enumerate(parse_type("((i -> o) -> o) -> o"))


def test_hasse_of_io():
    h = Domains(consts(2)).hasse(Arrow(IOTA, OMICRON))
    assert h["nodes"] == ["{}", "{a}", "{b}", "{a, b}"]
    assert sorted(map(tuple, h["edges"])) == [(0, 1), (0, 2), (1, 3), (2, 3)]
