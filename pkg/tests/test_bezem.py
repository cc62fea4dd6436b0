import itertools

import pytest
from hypothesis import given, settings, strategies as st

from hodef.bezem import (
    Deepening, GroundModel, check_extensionality, check_prec_monotonicity, is_ground_model,
    lfp_deepening, lfp_ground, lfp_ground_naive, prec_order,
)
from hodef.core import Const, Eq, load_program
from hodef.errors import NotDefinitional
from hodef.typesys import IOTA, OMICRON, Arrow
from hodef.universe import ActiveUniverse, GroundClause, ground_instantiation

from conftest import atom, corpus

IO = Arrow(IOTA, OMICRON)


def true_set(p, gm):
    return {p.show(a) for a in gm.true_atoms}


def test_example3_model(ex3):
    gm = lfp_ground(ground_instantiation(ex3, 2), 2)
    assert {"q(a)", "q(b)", "p(q)", "id(q)(a)", "p(id(q))"} <= true_set(ex3, gm)
    assert {ex3.show(a) for a in gm.upto(2)} == {
        "q(a)", "q(b)", "p(q)", "id(q)(a)", "id(q)(b)", "p(id(q))",
        "id(id(q))(a)", "id(id(q))(b)", "p(id(id(q)))"}


def test_self_loop_and_fact():
    p = load_program("p(a) :- p(a).")
    assert lfp_ground(ground_instantiation(p, 1)).true_atoms == frozenset()
    q = load_program("q(a).")
    assert true_set(q, lfp_ground(ground_instantiation(q, 0))) == {"q(a)"}


def test_equalities_have_fixed_truth():
    p = load_program("p(a).\np(b).\nr(X) :- p(X), X = a.")
    assert true_set(p, lfp_ground(ground_instantiation(p, 0))) == {"p(a)", "p(b)", "r(a)"}


def test_hoapata_programs_are_grounded():
    p = corpus("hoapata")
    gm = lfp_ground(ground_instantiation(p, 0))
    assert {p.show(a) for a in gm.true_atoms} == {"edge(a, b)", "edge(b, a)"}


def test_rejected_programs():
    with pytest.raises(NotDefinitional):
        Deepening(corpus("ex2_bad"))


# small random propositional programs for the two fixed point algorithms
props = [Const(n, OMICRON) for n in "pqrstuvw"]
ground_clauses = st.builds(GroundClause, st.sampled_from(props),
                           st.lists(st.sampled_from(props), max_size=3).map(tuple))


@settings(max_examples=300, deadline=None)
@given(st.lists(ground_clauses, max_size=10))
def test_worklist_equals_naive(gp):
    assert lfp_ground(gp).true_atoms == lfp_ground_naive(gp)


@settings(max_examples=200, deadline=None)
@given(st.lists(ground_clauses, max_size=8))
def test_least_model_by_exhaustion(gp):
    atoms = sorted({c.head for c in gp} | {b for c in gp for b in c.body}, key=lambda c: c.name)
    assert len(atoms) <= 12
    least = lfp_ground(gp)
    assert is_ground_model(gp, least)
    for bits in itertools.product((False, True), repeat=len(atoms)):
        m = GroundModel(frozenset(a for a, bit in zip(atoms, bits) if bit))
        if is_ground_model(gp, m):
            assert least.true_atoms <= m.true_atoms


def test_empty_model_fails_with_a_fact(ex3):
    assert not is_ground_model(ground_instantiation(ex3, 1), GroundModel(frozenset()))


@pytest.mark.parametrize("name", ["ex1", "ex3", "closure", "hoapata"])
def test_deepening_is_monotone(name):
    p = corpus(name)
    d = Deepening(p)
    for k in range(3):
        assert d.model(k).true_atoms <= d.model(k + 1).true_atoms


def test_deepening_examples(ex3, ex1):
    ans = lfp_deepening(ex3, atom(ex3, "p(id(q))"), 2, 4)
    assert ans.value and ans.settled_at == 2
    ans = lfp_deepening(ex1, atom(ex1, "r(p, q)"), 1, 3)
    assert ans.value and ans.settled_at == 1
    loop = load_program("p(a) :- p(a).")
    for k0, kmax in [(0, 0), (0, 3), (2, 4)]:
        ans = lfp_deepening(loop, atom(loop, "p(a)"), k0, kmax)
        assert not ans.value and ans.settled
    with pytest.raises(ValueError):
        lfp_deepening(ex3, atom(ex3, "p(id(id(q)))"), 1, 3)


CHAINS = """#type f : i -> i.
s(f(f(a))).
s(X) :- s(f(X)).
r(f(f(f(a)))).
r(X) :- r(f(X)).
t(X) :- t(X).
"""


def test_unsettled_label():
    """s(a) appears at depth 1 and r(a) at depth 2, so no two views agree before 3."""
    p = load_program(CHAINS)
    ans = lfp_deepening(p, atom(p, "t(a)"), 0, 2)
    assert not ans.value and not ans.settled
    ans = lfp_deepening(p, atom(p, "t(a)"), 0, 3)
    assert not ans.value and ans.settled_at == 3
    assert lfp_deepening(p, atom(p, "r(a)"), 0, 2).settled_at == 2


def test_settling_is_a_heuristic():
    """A derivation through a deep term can arrive after a quiet step."""
    p = load_program("#type f : i -> i.\ns(f(f(f(a)))).\ns(X) :- s(f(X)).")
    early = lfp_deepening(p, atom(p, "s(a)"), 0, 3)
    assert not early.value and early.settled_at == 1
    assert Deepening(p).model(2).value(atom(p, "s(a)"))


def test_prec_examples(ex3):
    d = Deepening(ex3)
    u = d.universe(1)
    rel = prec_order(IO, d.model(3), u)
    q, idq = atom(ex3, "p(q)").arg, atom(ex3, "p(id(q))").arg
    assert (q, idq) in rel and (idq, q) in rel
    assert all((t, t) in rel for t in u.terms(IO))
    p = load_program("q(a).\nr(b).")
    d = Deepening(p)
    rel = prec_order(IO, d.model(1), d.universe(0))
    qc, rc = Const("q", IO), Const("r", IO)
    assert (qc, rc) not in rel and (rc, qc) not in rel
    assert rel.bounded


def test_prec_is_a_preorder(ex3):
    d = Deepening(ex3)
    rel = prec_order(IO, d.model(3), d.universe(2))
    terms = d.universe(2).terms(IO)
    for x, y, z in itertools.product(terms, repeat=3):
        if (x, y) in rel and (y, z) in rel:
            assert (x, z) in rel


@pytest.mark.parametrize("name", ["ex1", "ex3", "closure", "both"])
def test_monotonicity_and_extensionality(name):
    p = corpus(name)
    assert check_prec_monotonicity(p, 1).ok
    assert check_extensionality(p, 1).ok


def test_extensionality_example3(ex3):
    rep = check_extensionality(ex3, 2)
    assert rep.ok and rep.checked > 0
    rep = check_prec_monotonicity(ex3, 2)
    assert rep.ok and rep.checked > 0


def test_first_order_is_vacuous():
    p = load_program("q(a).")
    rep = check_prec_monotonicity(p, 1)
    assert rep.ok
    assert check_extensionality(p, 1).checked == 0
