import itertools

import pytest

from chasekit import semantics as S
from chasekit.parsing import parse_formula, parse_sequent, parse_structure
from chasekit.syntax import TOP, Signature, Var, const

import oracles as O


def st(text):
    return parse_structure(text)


AB = "rel R/2\ncarrier: a b\nrel R: (a,b)\n"


def test_existential_evaluation_with_witness():
    A = st(AB)
    assert S.satisfy(A, parse_formula("exists y. R(x,y)"), {"x": "a"}) == {"y": "b"}
    assert not S.evaluate(A, parse_formula("exists y. R(x,y)"), {"x": "b"})


def test_top_and_equality():
    A = st(AB)
    assert S.evaluate(A, TOP, {})
    assert not S.evaluate(A, parse_formula("x = y"), {"x": "a", "y": "b"})
    assert S.evaluate(A, parse_formula("x = y"), {"x": "a", "y": "a"})


def test_validates():
    s = parse_sequent("P(x) |-[x] exists y. R(x,y)")
    A = parse_structure("rel P/1\nrel R/2\ncarrier: a\nrel P: (a)\n")
    assert not S.validates(A, s)
    B = parse_structure("rel P/1\nrel R/2\ncarrier: a b\nrel P: (a)\nrel R: (a,b)\n")
    assert S.validates(B, s)
    same = parse_sequent("P(x) |-[x] P(x)")
    assert S.validates(A, same) and S.validates(B, same)


def test_evaluation_agrees_with_brute_force():
    sig = Signature({}, {"P": 1, "R": 2})
    formulas = [parse_formula(t) for t in (
        "exists y. R(x,y) & P(y)",
        "R(x,x)",
        "exists y z. R(x,y) & R(y,z) & y = z",
        "P(x) & (exists y. R(y,x))",
    )]
    for A in O.all_structures(sig, 2):
        for phi in formulas:
            for a in A.carrier:
                assert S.evaluate(A, phi, {"x": a}) == O.holds(A, phi, {"x": a})


def test_representing_structure_merges_equal_variables():
    rep = S.representing_structure(parse_formula("R(x1,x2) & x1 = x2"), ("x1", "x2"))
    A = rep.structure
    assert len(A.carrier) == 1
    (e,) = A.carrier
    assert A.rels["R"] == {(e, e)}
    assert rep.tuple_of(("x1", "x2")) == (e, e)


def test_representing_structure_of_top():
    rep = S.representing_structure(TOP, ("x",), Signature({}, {"P": 1}))
    assert len(rep.structure.carrier) == 1
    assert rep.structure.fact_count() == 0


def test_representing_structure_two_elements():
    rep = S.representing_structure(parse_formula("P(x1) & R(x1,x2)"), ("x1", "x2"))
    e1, e2 = rep.tuple_of(("x1", "x2"))
    assert e1 != e2
    assert rep.structure.rels["P"] == {(e1,)}
    assert rep.structure.rels["R"] == {(e1, e2)}


def test_diagram_of_a_point():
    D = S.diagram(parse_structure("rel P/1\ncarrier: a\nrel P: (a)\n"))
    assert list(D.constant_of.values()) == ["c_a"]
    assert [parse_sequent("true |-[] P(c_a)", D.theory.signature)] == list(D.theory.axioms.values())


def test_diagram_of_empty_structure():
    D = S.diagram(S.Structure(Signature({}, {"P": 1}), (), {}))
    assert not D.constant_of and not D.theory.axioms


def test_diagram_with_function():
    D = S.diagram(parse_structure("fun f/1\ncarrier: a\nfun f: a->a\n"))
    (ax,) = D.theory.axioms.values()
    assert ax == parse_sequent("true |-[] f(c_a) = c_a", D.theory.signature)


def test_e_expansion_and_quotient():
    A = st(AB)
    B = S.e_expand(A, "E")
    assert B.rels["E"] == {("a", "a"), ("b", "b")}
    assert S.check_e_structure(B, "E") is None
    total = S.Structure(Signature({}, {"R": 2, "E": 2}), ("a", "b"),
                        {"R": {("a", "b")}, "E": set(itertools.product("ab", repeat=2))})
    Q = S.q_quotient(total, "E")
    assert len(Q.carrier) == 1
    (e,) = Q.carrier
    assert Q.rels["R"] == {(e, e)}


def test_extension_along_identity():
    A = st(AB)
    f = S.Homomorphism.identity(A)
    h = S.hom_extend_search(f, S.Homomorphism.identity(A))
    assert h is not None and h.map == f.map


def test_no_extension_when_relation_missing():
    empty = S.Structure(Signature({}, {"P": 1}), (), {})
    B = parse_structure("rel P/1\ncarrier: b\nrel P: (b)\n")
    M = parse_structure("rel P/1\ncarrier: m\n")
    f = S.Homomorphism(empty, M, {})
    g = S.Homomorphism(empty, B, {})
    assert S.hom_extend_search(f, g) is None


def test_strict_quotient_rejects_non_congruence():
    total = S.Structure(Signature({}, {"R": 2, "E": 2}), ("a", "b"),
                        {"R": {("a", "b")}, "E": set(itertools.product("ab", repeat=2))})
    with pytest.raises(S.NotAnEStructure):
        S.q_quotient(total, "E", strict=True)


def test_quotient_rejects_non_equivalence():
    B = S.Structure(Signature({}, {"E": 2}), ("a", "b"), {"E": {("a", "a"), ("b", "b"), ("a", "b")}})
    with pytest.raises(S.NotAnEStructure):
        S.q_quotient(B, "E")
