import itertools

import pytest

from hodef.core import (
    App, Classification, Const, Eq, Var, atom_depth, depth, load_program, substitute, variables,
)
from hodef.errors import TypeCheckError
from hodef.typesys import IOTA, OMICRON, Arrow

from conftest import corpus

IO = Arrow(IOTA, OMICRON)


def test_example1_types(ex1):
    preds = ex1.signature.predicates
    assert preds["p"] == IO and preds["q"] == IO
    assert preds["r"] == Arrow(IO, Arrow(IO, OMICRON))
    assert ex1.signature.individuals == ("a", "b")


def test_curried_head_is_an_application(ex3):
    c = ex3.clauses[-1]
    idt = ex3.signature.predicates["id"]
    assert c.head == App(App(Const("id", idt), Var("R", IO)), Var("X", IOTA))
    assert c.body == (App(Var("R", IO), Var("X", IOTA)),)


@pytest.mark.parametrize("name, cls, reasons", [
    ("ex1", Classification.DEFINITIONAL, []),
    ("ex3", Classification.DEFINITIONAL, []),
    ("ex2_bad", Classification.REJECTED, ["RepeatedFormal(Q)"]),
    ("ex2_nonconst_arg", Classification.REJECTED, ["NonVariablePredicateArgument(q)"]),
    ("ex2_extended", Classification.EXTENDED, ["ExtraBodyPredVar(Q)"]),
    ("hoapata", Classification.HOAPATA, ["PredicateVariableHead(P)"]),
    ("closure", Classification.DEFINITIONAL, []),
])
def test_classification(name, cls, reasons):
    p = corpus(name)
    assert p.classification == cls
    assert [str(r) for r in p.reasons] == reasons


def test_individual_head_terms_become_equalities():
    p = load_program("p(a, X, X).")
    c = p.clauses[0]
    assert c.reasons == ()
    assert [v.name for v in c.formals] == ["H$1", "X", "H$3"]
    assert c.norm_body == (Eq(Var("H$1", IOTA), Const("a", IOTA)), Eq(Var("H$3", IOTA), Var("X", IOTA)))


def test_extra_variables():
    c = load_program("p(X) :- q(X, Y), R(Y).").clauses[0]
    assert [v.name for v in c.extra_ind_vars] == ["Y"]
    assert [v.name for v in c.extra_pred_vars] == ["R"]


def test_classification_ignores_clause_order():
    text = ["q(a).", "p(Q) :- Q(a).", "r(X) :- S(X).", "id(R)(X) :- R(X)."]
    seen = set()
    for perm in itertools.permutations(text):
        p = load_program("\n".join(perm))
        seen.add((p.classification, frozenset(map(str, p.reasons))))
    assert len(seen) == 1


@pytest.mark.parametrize("text, code", [
    ("p(a). p(a, b).", "TypeConflict"),
    ("p(X) :- X(a), X = a.", "TypeConflict"),
    ("#type f : i -> i.\np(f).", "ArityMismatch"),
    ("p(X) :- X = Q(a).", "TypeConflict"),
])
def test_type_errors(text, code):
    with pytest.raises(TypeCheckError) as e:
        load_program(text)
    assert code in {i.code for i in e.value.issues}


def test_unresolved_higher_order_needs_annotation():
    with pytest.raises(TypeCheckError) as e:
        load_program("p(Q) :- r(Q(a)).")
    assert "UnresolvedHigherOrderType" in {i.code for i in e.value.issues}


def test_propositional_arguments():
    p = load_program("t.\np(X) :- X.\nq :- p(t).")
    assert p.signature.predicates["p"] == Arrow(OMICRON, OMICRON)


def test_anonymous_variables_are_independent():
    p = load_program("q(a).\nr(_, _) :- q(a).\np(Q) :- r(Q, _), Q(a).")
    assert p.signature.predicates["r"] == Arrow(IO, Arrow(IOTA, OMICRON))


def test_annotations_fix_types():
    p = load_program("p(Q) :- Q(a).", {"p": Arrow(IO, OMICRON)})
    assert p.signature.predicates["p"] == Arrow(IO, OMICRON)


def test_function_symbols():
    p = load_program("nat(z).\nnat(s(X)) :- nat(X).")
    assert p.signature.functions == {"s": 1}
    assert p.has_functions


def test_depth_measures(ex3):
    from conftest import atom
    assert depth(atom(ex3, "id(id(q))(a)").fun) == 2
    assert atom_depth(atom(ex3, "p(id(q))")) == 1
    assert atom_depth(atom(ex3, "id(id(q))(a)")) == 2
    assert atom_depth(atom(ex3, "q(a)")) == 0


def test_substitute_and_variables(ex3):
    c = ex3.clauses[-1]
    assert [v.name for v in variables(c.head)] == ["R", "X"]
    g = substitute(c.head, {"R": Const("q", IO), "X": Const("a", IOTA)})
    assert ex3.show(g) == "id(q)(a)"


@pytest.mark.parametrize("name", ["ex1", "ex3", "closure", "ex2_extended", "hoapata", "both"])
def test_source_round_trip(name):
    p = corpus(name)
    q = load_program(p.source())
    assert q.clauses == p.clauses
    assert q.signature == p.signature


def test_json_is_stable(ex3):
    assert ex3.to_json_text() == load_program(ex3.source()).to_json_text()
