import pytest

from chasekit import proofs as P
from chasekit.errors import ParseError
from chasekit.parsing import parse_formula, parse_theory
from chasekit.syntax import Conj, Sequent, Var, const

import corpus as K

T = parse_theory("rel P/1\nrel Q/1\nrel R/1\nrel S/1\nrel R2/2\naxiom a1: true |-[x1,x2] R2(x1,x2)\n")


def F(text, ctx=None):
    return parse_formula(text, T.signature.extend(funs={"c1": 0, "c2": 0}), ctx)


def test_identity_checks():
    assert P.check_derivation(P.identity(("x",), F("P(x)")), T)


def test_mismatched_cut_fails_at_root():
    a = P.Derivation("Identity", Sequent(("x",), F("P(x)"), F("P(x)")))
    bad = P.Derivation(
        "Cut",
        Sequent(("x",), F("P(x)"), F("S(x)")),
        (P.Derivation("TheoryAxiom", Sequent(("x",), F("P(x)"), F("Q(x)")), (), "a1"),
         P.Derivation("TheoryAxiom", Sequent(("x",), F("R(x)"), F("S(x)")), (), "a1")),
    )
    res = P.check_derivation(bad, T)
    assert not res
    assert res.where == "root"
    assert str(res).startswith("FAIL at root (Cut)")


def test_failure_path_points_into_the_tree():
    leaf = P.Derivation("Identity", Sequent(("x",), F("P(x)"), F("Q(x)")))
    d = P.Derivation("Cut", Sequent(("x",), F("P(x)"), F("Q(x)")), (P.identity(("x",), F("P(x)")), leaf))
    res = P.check_derivation(d, T)
    assert not res and res.where == "root.1" and res.rule == "Identity"


def test_substitution_instance_of_axiom():
    d = P.substitution(P.axiom(T, "a1"), {"x1": const("c1"), "x2": const("c2")}, ())
    assert d.conclusion == Sequent((), F("true"), F("R2(c1,c2)"))
    assert P.check_derivation(d, T)


def test_unknown_axiom_fails():
    d = P.Derivation("TheoryAxiom", Sequent(("x",), F("P(x)"), F("Q(x)")), (), "nope")
    assert not P.check_derivation(d, T)


def test_and_rules():
    c = Conj((F("P(x)"), F("Q(x)"), F("R(x)")))
    for i in range(3):
        assert P.check_derivation(P.and_elim(("x",), c, i), T)
    d = P.and_intro([P.and_elim(("x",), c, 2), P.and_elim(("x",), c, 0)])
    assert P.check_derivation(d, T)
    assert d.conclusion.cons == Conj((F("R(x)"), F("P(x)")))


def test_equality_rules():
    assert P.check_derivation(P.eq_refl(("x",), Var("x")), T)
    d = P.eq_subst(("x", "y"), [("x", "y")], F("P(x)"))
    assert P.check_derivation(d, T)
    assert d.conclusion.cons == F("P(y)")


def test_existential_rules():
    body = F("R2(x,y)")
    up = P.exists_intro(("x",), body, ("y",))
    assert P.check_derivation(up, T)
    down = P.exists_down(up, ("y",))
    assert P.check_derivation(down, T)
    assert down.conclusion.ante == F("exists y. R2(x,y)")
    fr = P.frobenius(("x",), F("P(x)"), F("exists y. R2(x,y)"))
    assert P.check_derivation(fr, T)


def test_corpus_checks_and_round_trips():
    for name, (d, _) in K.ABSTRACTION.items():
        assert P.check_derivation(d, K.THEORY), name
        text = P.format_derivation(d)
        back = P.parse_derivation(text, sig=K.SIG)
        assert P.format_derivation(back) == text, name
        assert P.check_derivation(back, K.THEORY), name


def test_derivation_file_errors():
    with pytest.raises(ParseError):
        P.parse_derivation("1: Identity :: P(x) |-[x] P(x)\n2: Cut <- 1, 3 :: P(x) |-[x] P(x)\n")
    with pytest.raises(ParseError):
        P.parse_derivation("1: Frobnicate :: P(x) |-[x] P(x)\n")


def test_comments_are_ignored():
    d = P.parse_derivation("# a proof\n1: Identity :: P(x) |-[x] P(x)\n")
    assert d.rule == "Identity"
