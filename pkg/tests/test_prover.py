import pytest

from chasekit import proofs as P
from chasekit.errors import ProofSearchFailed
from chasekit.parsing import parse_formula, parse_sequent, parse_theory
from chasekit.prover import prove_sequent

T = parse_theory(
    "rel P/1\nrel R/2\nrel Q/1\n"
    "axiom t1: P(x) |-[x] exists y. P(x) & R(x,y)\n"
    "axiom t2: R(x,y) |-[x,y] R(x,y) & Q(y)\n"
)


@pytest.mark.parametrize(
    "text",
    [
        "P(x) |-[x] P(x)",
        "P(x) |-[x] exists y. R(x,y) & Q(y)",
        "R(x,y) & x = z |-[x,y,z] R(z,y)",
        "exists y. R(x,y) |-[x] exists z. Q(z)",
        "P(x) & x = y |-[x,y] exists z. R(y,z)",
    ],
)
def test_proves_and_checks(text):
    s = parse_sequent(text, T.signature)
    d = prove_sequent(T, s, fuel=5)
    assert P.check_derivation(d, T)
    assert d.conclusion.alpha_eq(s)


def test_unprovable_goal():
    with pytest.raises(ProofSearchFailed):
        prove_sequent(T, parse_sequent("P(x) |-[x] Q(x)", T.signature), fuel=4)
