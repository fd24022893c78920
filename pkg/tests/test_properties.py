import itertools
import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from chasekit import chase as C
from chasekit import generate as G
from chasekit import normalize as N
from chasekit import proofs as P
from chasekit.parsing import format_formula, format_structure, parse_formula, parse_structure
from chasekit.semantics import e_expand, evaluate, find_isomorphism, q_quotient
from chasekit.syntax import Signature, Var, alpha_eq, subst

import oracles as O

SIG = Signature({}, {"P": 1, "R": 2})
FSIG = Signature({"f": 1, "k": 0}, {"P": 1, "R": 2})
cfg = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])

seeds = st.integers(min_value=0, max_value=2**32)


@cfg
@given(seeds)
def test_formula_print_parse(seed):
    r = random.Random(seed)
    phi = G.regular_formula(r, FSIG, ("x0", "x1"), equality=True, terms=True)
    assert parse_formula(format_formula(phi), FSIG) == phi


@cfg
@given(seeds)
def test_structure_print_parse(seed):
    r = random.Random(seed)
    A = G.structure(r, FSIG, max_size=3)
    assert parse_structure(format_structure(A)).same_as(A)


@cfg
@given(seeds)
def test_evaluation_matches_tarski(seed):
    r = random.Random(seed)
    A = G.structure(r, FSIG, max_size=3, density=0.5)
    phi = G.regular_formula(r, FSIG, ("x0",), equality=True, terms=True)
    for a in A.carrier:
        assert evaluate(A, phi, {"x0": a}) == O.holds(A, phi, {"x0": a})


@cfg
@given(seeds)
def test_bound_renaming_is_alpha_equivalent(seed):
    r = random.Random(seed)
    phi = G.regular_formula(r, SIG, ("x0",))
    moved = subst(phi, {"x0": Var("x0")})
    assert alpha_eq(phi, moved)


@cfg
@given(seeds)
def test_equality_translation_transfers_truth(seed):
    r = random.Random(seed)
    A = G.structure(r, SIG, max_size=3, density=0.5)
    phi = G.regular_formula(r, SIG, ("x0", "x1"), equality=True)
    phiE = N.to_equality_predicate(phi, "E")
    B = e_expand(A, "E")
    for args in itertools.product(A.carrier, repeat=2):
        env = dict(zip(("x0", "x1"), args))
        assert evaluate(A, phi, env) == evaluate(B, phiE, env)


@cfg
@given(seeds)
def test_quotient_of_expansion(seed):
    r = random.Random(seed)
    A = G.structure(r, FSIG, max_size=3)
    Q = q_quotient(e_expand(A, "E"), "E")
    assert find_isomorphism(A, Q, {a: a for a in A.carrier}) is not None


@cfg
@given(seeds)
def test_flattening_preserves_truth(seed):
    r = random.Random(seed)
    A = G.structure(r, FSIG, max_size=3, density=0.5)
    phi = G.regular_formula(r, FSIG, ("x0",), terms=True)
    graphs = N.graph_symbols(FSIG)
    flat = N.flatten(phi, graphs)
    B = N.structure_of_graphs(A, graphs)
    for a in A.carrier:
        assert evaluate(A, phi, {"x0": a}) == evaluate(B, flat, {"x0": a})


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_saturated_chase_is_a_model(seed):
    r = random.Random(seed)
    T, A = G.tame_instance(r)
    tr = C.chase(T, A, 10)
    if tr.saturated:
        assert O.is_model(tr.final, T)
    # each level includes into the next
    for i in range(len(tr.levels) - 1):
        assert tr.embedding(i).injective


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_witness_descends_to_base(seed):
    r = random.Random(seed)
    T, A = G.tame_instance(r, max_axioms=3)
    tr = C.chase(T, A, 8)
    phi = G.regular_formula(r, T.signature, ("x0",))
    for a in A.carrier:
        if evaluate(tr.final, phi, {"x0": a}):
            w = C.conservativity_witness(tr, phi, ("x0",), (a,))
            assert evaluate(A, w.psi, {"x0": a})
            assert P.check_derivation(w.proof, T)
            break
