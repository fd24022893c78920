import pytest

from chasekit import chase as C
from chasekit import generate as G
from chasekit import proofs as P
from chasekit.errors import NotSatisfiedAtAnyLevel, PreconditionViolation
from chasekit.parsing import parse_formula, parse_sequent, parse_structure, parse_theory
from chasekit.semantics import evaluate, find_isomorphism, is_model
from chasekit.syntax import Sequent, Signature, Theory

import oracles as O

T1 = parse_theory("rel P/1\nrel R/2\nrel Q/1\naxiom t1: P(x) |-[x] exists y. P(x) & R(x,y)\n")
T12 = parse_theory(
    "rel P/1\nrel R/2\nrel Q/1\n"
    "axiom t1: P(x) |-[x] exists y. P(x) & R(x,y)\n"
    "axiom t2: R(x,y) |-[x,y] R(x,y) & Q(y)\n"
)
A = parse_structure("rel P/1\nrel R/2\nrel Q/1\ncarrier: a\nrel P: (a)\n")


def test_one_step_adds_a_witness():
    B, incl = C.one_step(T1, A)
    w = C.New(1, "t1", ("a",), 0)
    assert set(B.carrier) == {"a", w}
    assert B.rels["P"] == {("a",)}
    assert B.rels["R"] == {("a", w)}
    assert incl.map == {"a": "a"}


def test_one_step_without_instances():
    B, _ = C.one_step(parse_theory("rel P/1\nrel Q/1\naxiom a: Q(x) |-[x] Q(x) & P(x)\n"),
                      parse_structure("rel P/1\nrel Q/1\ncarrier: a\nrel P: (a)\n"))
    assert B.size == 1 and B.rels["P"] == {("a",)}


def test_saturation_on_fixture():
    tr = C.chase(T12, A, 10)
    assert tr.saturated and tr.saturated_at <= 3
    M = tr.final
    (b,) = [e for e in M.carrier if e != "a"]
    assert M.rels["P"] == {("a",)}
    assert M.rels["R"] == {("a", b)}
    assert M.rels["Q"] == {(b,)}


def test_non_terminating_theory_exhausts_fuel():
    T = parse_theory("rel P/1\nrel R/2\naxiom a: P(x) |-[x] exists y. P(x) & R(x,y) & P(y)\n")
    tr = C.chase(T, A.__class__(T.signature, ("a",), {"P": {("a",)}}), 3)
    assert tr.status == "fuel-exhausted"
    assert [lvl.size for lvl in tr.levels] == [1, 2, 3, 4]


def test_empty_theory_fuel_zero():
    T = Theory(Signature({}, {"P": 1}), {})
    B = parse_structure("rel P/1\ncarrier: a\nrel P: (a)\n")
    tr = C.chase(T, B, 0)
    assert tr.saturated and tr.saturated_at == 0
    assert tr.final.same_as(B)


def test_chase_rejects_non_normal_theory():
    T = parse_theory("rel P/1\nrel R/2\naxiom a: P(x) |-[x] exists y. R(x,y)\n")
    with pytest.raises(PreconditionViolation):
        C.chase(T, parse_structure("rel P/1\nrel R/2\ncarrier: a\n"), 2)


@pytest.mark.parametrize("mode", C.MODES)
def test_modes_reach_models(mode):
    tr = C.chase(T12, A, 10, mode)
    if mode == "faithful":
        # re-firing the existential instance never stops
        assert tr.status == "fuel-exhausted"
    else:
        assert tr.saturated and is_model(tr.final, T12)


def test_jobs_do_not_change_the_trace():
    r = G.rng(7)
    for _ in range(10):
        T, B = G.tame_instance(r)
        a = C.chase(T, B, 8, jobs=1)
        b = C.chase(T, B, 8, jobs=4)
        assert a.status == b.status
        assert a.firings == b.firings
        assert a.final.same_as(b.final)


def test_engine_matches_naive_oracle():
    r = G.rng(11)
    for _ in range(25):
        T, B = G.tame_instance(r)
        tr = C.chase(T, B, 12)
        status, M, _ = O.naive_chase(T, B, 12)
        assert status == tr.status
        if tr.saturated:
            assert O.is_model(tr.final, T)
            assert O.isomorphic(tr.final, M)


# -- witnesses --------------------------------------------------------------------------------


def test_witness_for_existential():
    tr = C.chase(T1, A, 5)
    phi = parse_formula("exists y. R(x,y)")
    w = C.conservativity_witness(tr, phi, ("x",), ("a",))
    assert evaluate(A, w.psi, {"x": "a"})
    assert P.check_derivation(w.proof, T1)
    assert w.proof.conclusion.alpha_eq(Sequent(("x",), w.psi, phi))
    assert "t1" in w.proof.axioms_used()
    assert O.equivalent_on_small(T1.signature, w.psi, parse_formula("P(x)"), ("x",))


def test_witness_at_level_zero_is_the_formula():
    tr = C.chase(T1, A, 5)
    phi = parse_formula("P(x)")
    w = C.conservativity_witness(tr, phi, ("x",), ("a",))
    assert w.level == 0 and w.psi == phi


def test_witness_missing():
    tr = C.chase(T12, A, 5)
    with pytest.raises(NotSatisfiedAtAnyLevel):
        C.conservativity_witness(tr, parse_formula("Q(x)"), ("x",), ("a",))


# -- general signatures and entailment ----------------------------------------------------------


def test_general_chase_with_function():
    T = parse_theory("fun f/1\nrel P/1\naxiom a: P(x) |-[x] P(f(x))\n")
    B = parse_structure("fun f/1\nrel P/1\ncarrier: a\nfun f: a->a\nrel P: (a)\n")
    gc = C.chase_general(T, B, 10)
    assert gc.saturated
    assert is_model(gc.model, T)
    assert find_isomorphism(B, gc.model) is not None


def test_general_chase_tautology():
    T = parse_theory("rel P/1\naxiom a: true |-[x] x = x\n")
    B = parse_structure("rel P/1\ncarrier: a b\nrel P: (a)\n")
    gc = C.chase_general(T, B, 10)
    assert gc.saturated and find_isomorphism(B, gc.model) is not None


def test_general_chase_identifies_elements():
    T = parse_theory("fun f/1\nrel P/1\naxiom a: P(x) |-[x] P(f(x))\naxiom b: P(x) & P(y) |-[x,y] x = y\n")
    B = parse_structure("fun f/1\nrel P/1\ncarrier: a b\nfun f: a->b b->a\nrel P: (a)\n")
    gc = C.chase_general(T, B, 30)
    assert gc.saturated and gc.model.size == 1 and is_model(gc.model, T)


def test_relational_normal_theory_passes_through():
    gc = C.chase_general(T12, A, 10)
    tr = C.chase(T12, A, 10)
    assert gc.model.same_as(tr.final)
    assert gc.trace.firings == tr.firings


def test_entails_provable_and_refuted():
    s = parse_sequent("P(x) |-[x] exists y. R(x,y) & Q(y)", T12.signature)
    res = C.entails(T12, s, 10)
    assert res.verdict == "provable" and res.disjunct == 1
    assert P.check_derivation(res.proof, T12)
    assert res.proof.conclusion.alpha_eq(s)

    s = parse_sequent("P(x) |-[x] Q(x)", T12.signature)
    res = C.entails(T12, s, 10)
    assert res.verdict == "refuted"
    assert is_model(res.countermodel, T12)
    assert not evaluate(res.countermodel, parse_formula("Q(x)"), res.assignment)


def test_entails_identity():
    s = parse_sequent("R(x,y) |-[x,y] R(x,y)", T12.signature)
    assert C.entails(T12, s, 5).verdict == "provable"


def test_entails_unknown_when_fuel_runs_out():
    T = parse_theory("rel P/1\nrel R/2\naxiom a: P(x) |-[x] exists y. P(x) & R(x,y) & P(y)\n")
    s = parse_sequent("P(x) |-[x] R(x,x)", T.signature)
    assert C.entails(T, s, 3).verdict == "unknown"


def test_disjunction_split():
    s = parse_sequent("P(x) |-[x] Q(x) | (exists y. R(x,y))", T12.signature)
    assert C.disjunction_split(T12, s, 10).index == 2
    s = parse_sequent("P(x) |-[x] P(x) | Q(x)", T12.signature)
    assert C.disjunction_split(T12, s, 10).index == 1
    s = parse_sequent("P(x) |-[x] Q(x) | Q(x)", T12.signature)
    assert C.disjunction_split(T12, s, 10).verdict == "refuted"


def test_entails_agrees_with_small_countermodels():
    # Provable claims must have no small countermodel; refutations come with one.
    T = parse_theory("rel P/1\nrel R/2\naxiom a: P(x) |-[x] exists y. P(x) & R(x,y)\naxiom b: R(x,y) |-[x,y] R(x,y) & R(y,x)\n")
    for text in ("P(x) |-[x] exists y. R(y,x)", "R(x,y) |-[x,y] R(y,x)", "P(x) |-[x] R(x,x)", "R(x,y) |-[x,y] P(y)"):
        s = parse_sequent(text, T.signature)
        res = C.entails(T, s, 10)
        small = O.small_countermodel(T, s, 2)
        if res.verdict == "provable":
            assert small is None
        else:
            assert res.verdict == "refuted" and O.is_model(res.countermodel, T)
