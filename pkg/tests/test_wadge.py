import random

import pytest

from hodef.core import Const, Eq, load_program
from hodef.diff import (
    check_eval_monotonicity, check_ground_restriction, check_minimality, check_substitution_lemma,
    check_tp_monotonicity,
)
from hodef.domains import FALSE, TRUE, Individual, Rel, show_value
from hodef.errors import InfiniteDomain, NotDefinitional, UnboundVariable
from hodef.typesys import IOTA, OMICRON, Arrow
from hodef.universe import ActiveUniverse
from hodef.wadge import Wadge, eval_expr, eval_ground_atom, ground_restrict, is_model, lfp_wadge, tp_step

from conftest import atom, corpus

IO = Arrow(IOTA, OMICRON)
a, b = Individual(Const("a", IOTA)), Individual(Const("b", IOTA))


def rel(*tuples, types=(IOTA,)):
    return Rel(types, frozenset(tuples))


def shown(p, m):
    return {name: show_value(m[name]) for name in m.values}


def test_example1_model(ex1):
    m, steps = lfp_wadge(ex1)
    assert shown(ex1, m) == {"p": "{a}", "q": "{b}", "r": "{({a}, {b})}"}
    assert steps == 1


def test_example1_first_step_from_bottom(ex1):
    w = Wadge(ex1)
    assert show_value(w.tp_step(w.bottom())["r"]) == "{({a}, {b})}"


def test_example3_converges_in_one_step(ex3):
    m, steps = lfp_wadge(ex3)
    assert steps == 1
    assert shown(ex3, m) == {"q": "{a, b}", "p": "{{a}}", "id": "{({a}, a), ({b}, b)}"}
    w = Wadge(ex3)
    assert w.tp_step(w.bottom()) == m


def test_trace(ex3):
    m, steps, chain = Wadge(ex3).lfp(trace=True)
    assert len(chain) == steps + 1 and chain[-1] == m


def test_empty_program():
    m, steps = lfp_wadge(load_program(""))
    assert m.values == {} and steps == 0


def test_self_loop_stays_false():
    p = load_program("p(X) :- p(X).\nq(a).")
    m, _ = lfp_wadge(p)
    assert shown(p, m) == {"p": "{}", "q": "{a}"}


def test_transitive_closure_is_parametric():
    p = corpus("closure")
    m, _ = lfp_wadge(p)
    assert show_value(m["reach"]) == "{b, c}"


def test_eval_expr_examples(ex3):
    w = Wadge(ex3)
    i = w.bottom()
    q_atom = ex3.clauses[2].body[0]  # Q(a)
    assert eval_expr(q_atom, i, {"Q": rel((a,), (b,))}) == TRUE
    r_atom = ex3.clauses[3].body[0]  # R(X)
    assert eval_expr(r_atom, i, {"R": rel((b,)), "X": a}) == FALSE
    ca, cb = Const("a", IOTA), Const("b", IOTA)
    assert eval_expr(Eq(ca, ca), i, {}) == TRUE
    assert eval_expr(Eq(ca, cb), i, {}) == FALSE
    with pytest.raises(UnboundVariable):
        eval_expr(q_atom, i, {})


def test_ground_atoms(ex3):
    m, _ = lfp_wadge(ex3)
    for text in ["p(id(q))", "id(q)(b)", "p(id(id(q)))", "q(a)"]:
        assert eval_ground_atom(m, atom(ex3, text))


def test_ground_atoms_false(ex1):
    m, _ = lfp_wadge(ex1)
    assert eval_ground_atom(m, atom(ex1, "r(p, q)"))
    for text in ["r(q, p)", "p(b)", "q(a)", "r(p, p)"]:
        assert not eval_ground_atom(m, atom(ex1, text))


def test_is_model(ex3):
    w = Wadge(ex3)
    m, _ = w.lfp()
    assert is_model(ex3, m)
    assert not w.is_model(w.bottom())
    assert w.is_model(w.top())


def test_ground_restriction_example3(ex3):
    m, _ = lfp_wadge(ex3)
    gm = ground_restrict(m, ActiveUniverse(ex3, 1))
    assert {ex3.show(x) for x in gm.true_atoms} == {
        "q(a)", "q(b)", "p(q)", "p(id(q))", "id(q)(a)", "id(q)(b)"}
    assert ground_restrict(Wadge(ex3).bottom(), ActiveUniverse(ex3, 1)).true_atoms == frozenset()


def test_ground_restriction_example1(ex1):
    m, _ = lfp_wadge(ex1)
    gm = ground_restrict(m, ActiveUniverse(ex1, 1))
    assert {"p(a)", "q(b)", "r(p, q)"} <= {ex1.show(x) for x in gm.true_atoms}
    assert "r(q, p)" not in {ex1.show(x) for x in gm.true_atoms}


def test_rejects_other_classes():
    with pytest.raises(NotDefinitional):
        Wadge(corpus("ex2_extended"))
    with pytest.raises(NotDefinitional):
        Wadge(corpus("hoapata"))
    with pytest.raises(NotDefinitional):
        Wadge(corpus("ex2_bad"), extended=True)


def test_extended_mode_is_existential():
    p = corpus("ex2_extended")
    m, _ = lfp_wadge(p, extended=True)
    assert show_value(m["p"]) == "{a}"


def test_function_symbols_need_a_window():
    p = load_program("nat(z).\nnat(s(X)) :- nat(X).")
    with pytest.raises(InfiniteDomain):
        Wadge(p)
    m, _ = Wadge.windowed(p, 2).lfp()
    assert show_value(m["nat"]) == "{z, s(z), s(s(z))}"


def test_existential_extra_individuals():
    """One witness suffices; reading the extra variable universally would make s false."""
    p = load_program("e(a, b).\ns(X) :- e(X, Y).")
    m, _ = lfp_wadge(p)
    assert show_value(m["s"]) == "{a}"


def test_tp_step_function(ex3):
    w = Wadge(ex3)
    assert tp_step(ex3, w.bottom()) == w.tp_step(w.bottom())


@pytest.mark.parametrize("name, samples", [("ex1", 15), ("ex3", 15), ("both", 15), ("closure", 2)])
def test_properties_on_corpus(name, samples):
    p = corpus(name)
    w = Wadge(p)
    rng = random.Random(7)
    m, _ = w.lfp()
    u = ActiveUniverse(p, 1)
    assert check_tp_monotonicity(w, rng, samples) == []
    assert check_eval_monotonicity(w, rng, 2 * samples) == []
    assert check_substitution_lemma(p, m, u, rng, 30) == []
    assert check_ground_restriction(w, 1) == []


@pytest.mark.parametrize("text", [
    "q(a).\np(Q) :- Q(a).",
    "p(a).\nq(X) :- p(X).\nr(Q) :- Q(b).",
    "t.\nu(X) :- X.\nv :- u(t).",
    "e(a, b).\ns(X) :- e(X, Y), e(Y, X).",
])
def test_lfp_is_the_least_model(text):
    seen = check_minimality(Wadge(load_program(text)), limit=50_000)
    assert seen is not None
    models, failures = seen
    assert models >= 1 and failures == []
