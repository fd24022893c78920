import itertools

import pytest

from chasekit import normalize as N
from chasekit.errors import NotFunctional, NotRegular
from chasekit.parsing import parse_formula, parse_sequent, parse_structure, parse_theory
from chasekit.semantics import Structure, e_expand
from chasekit.syntax import TOP, Eq, Exists, Rel, Sequent, Signature, Theory, Var, conj, exists

import oracles as O

SIG_R = Signature({}, {"R": 2})
SIG_PR = Signature({}, {"P": 1, "R": 2})


def seq(text):
    return parse_sequent(text)


def _sequent_equivalent(sig, s, ns):
    """Both directions of s <-> ns hold in every structure with at most 3 elements."""
    t = ns.to_sequent()
    for A in O.all_structures(sig, 3):
        if O.sequent_holds(A, s) != O.sequent_holds(A, t):
            return False
    return True


def test_normal_form_of_existential_consequent():
    s = seq("P(x) |-[x] exists y. R(x,y)")
    ns = N.normalize_sequent(s)
    assert ns.ctx == ("x",)
    assert ns.antecedent == (parse_formula("P(x)"),)
    assert ns.bound == ("y",)
    assert ns.matrix == (parse_formula("P(x)"), parse_formula("R(x,y)"))
    assert _sequent_equivalent(SIG_PR, s, ns)


def test_normal_form_without_existentials():
    s = parse_sequent("R(x,y) |-[x,y] Q(y)")
    ns = N.normalize_sequent(s)
    assert ns.bound == ()
    assert ns.matrix == (parse_formula("R(x,y)"), parse_formula("Q(y)"))
    assert _sequent_equivalent(Signature({}, {"R": 2, "Q": 1}), s, ns)


def test_normal_form_of_top():
    ns = N.normalize_sequent(Sequent((), TOP, TOP))
    assert ns.ctx == () and ns.antecedent == () and ns.bound == () and ns.matrix == ()


def test_normal_input_is_returned_as_is():
    s = seq("P(x) |-[x] exists y. P(x) & R(x,y)")
    assert N.normalize_sequent(s).to_sequent() == s


def test_antecedent_existentials_are_hoisted():
    s = seq("exists y. R(x,y) |-[x] exists z. R(x,z)")
    ns = N.normalize_sequent(s)
    assert len(ns.ctx) == 2
    assert _sequent_equivalent(SIG_R, s, ns)


def test_disjunction_has_no_normal_form():
    with pytest.raises(NotRegular):
        N.normalize_sequent(seq("P(x) |-[x] P(x) | P(x)"))


@pytest.mark.parametrize(
    "gamma,alpha,expected",
    [
        ("R(x,y) & x = y", "R(y,x)", True),
        ("P(x)", "Q(x)", False),
        ("true", "x = x", True),
    ],
)
def test_horn_entailment(gamma, alpha, expected):
    g = parse_formula(gamma)
    atoms = g.parts if hasattr(g, "parts") else (g,)
    assert N.horn_entails(atoms, parse_formula(alpha), ("x", "y")) is expected


def test_equality_elimination_replaces_equality():
    T = parse_theory("rel R/2\naxiom a: x = y |-[x,y] R(x,y)\n")
    E = N.equality_symbol(T.signature)
    TE = N.eliminate_equality(T, E)
    assert TE.axioms["a"] == Sequent(("x", "y"), Rel(E, (Var("x"), Var("y"))), parse_formula("R(x,y)"))
    assert not TE.has_equality


def test_equality_axioms_for_empty_theory():
    T = Theory(SIG_R, {})
    TE = N.eliminate_equality(T, "E")
    got = sorted(TE.axioms.values(), key=repr)
    x, y, z = Var("x"), Var("y"), Var("z")
    # reflexivity, symmetry, transitivity and the congruence for R
    assert len(got) == 4
    # every one holds in e(A) for random A
    for A in O.all_structures(SIG_R, 2):
        B = e_expand(A, "E")
        assert O.is_model(B, TE)


def test_flattening_a_unary_function():
    T = parse_theory("fun f/1\nrel P/1\naxiom a: true |-[x] P(f(x))\n")
    sig, TB = N.eliminate_functions(T)
    graphs = N.graph_symbols(T.signature)
    Ff = graphs["f"]
    flat = N.translate_sequent(T.axioms["a"], graphs)
    for A in O.all_structures(T.signature, 3):
        B = N.structure_of_graphs(A, graphs)
        assert O.sequent_holds(A, T.axioms["a"]) == O.sequent_holds(B, flat)
    assert sig.relational and Ff in sig.rels
    assert {"fn_total_f", "fn_single_f"} <= set(TB.axioms)


def test_flattening_a_constant():
    T = parse_theory("fun c/0\nrel P/1\naxiom a: true |-[] P(c)\n")
    sig, TB = N.eliminate_functions(T)
    graphs = N.graph_symbols(T.signature)
    flat = N.translate_sequent(T.axioms["a"], graphs)
    for A in O.all_structures(T.signature, 3):
        B = N.structure_of_graphs(A, graphs)
        assert O.sequent_holds(A, T.axioms["a"]) == O.sequent_holds(B, flat)
        assert O.is_model(B, Theory(sig, {k: v for k, v in TB.axioms.items() if k.startswith("fn_")}))


def test_relational_theory_unchanged_by_flattening():
    T = parse_theory("rel P/1\nrel R/2\naxiom t1: P(x) |-[x] exists y. P(x) & R(x,y)\n")
    sig, TB = N.eliminate_functions(T)
    assert sig == T.signature
    assert TB == T


def test_graph_structure_round_trip():
    A = parse_structure("fun f/1\ncarrier: a b\nfun f: a->b b->a\n")
    B = N.structure_of_graphs(A)
    Ff = N.graph_symbols(A.signature)["f"]
    assert B.rels[Ff] == {("a", "b"), ("b", "a")}
    assert N.graphs_to_structure(B, A.signature).same_as(A)


def test_graph_structure_not_functional():
    sig = Signature({"f": 1}, {})
    Ff = N.graph_symbols(sig)["f"]
    B = Structure(Signature({}, {Ff: 2}), ("a", "b"), {Ff: {("a", "b"), ("a", "a")}})
    with pytest.raises(NotFunctional):
        N.graphs_to_structure(B, sig)
