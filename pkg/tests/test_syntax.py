import pytest

from chasekit.errors import NotASubcontext, UnboundVariable
from chasekit.parsing import parse_formula, parse_sequent
from chasekit.syntax import (
    TOP,
    Exists,
    Fragment,
    Rel,
    Var,
    alpha_eq,
    classify_fragment,
    const,
    free_vars,
    prenex,
    substitute,
    weaken,
)


def f(text, ctx=None):
    return parse_formula(text, None, ctx)


def test_identity_substitution():
    phi = f("R(x,y)")
    assert substitute(phi, {"x": Var("x"), "y": Var("y")}, ("x", "y")) == phi


def test_substitution_by_one_constant_twice():
    c = const("c")
    out = substitute(f("R(x1,x2)"), {"x1": c, "x2": c}, ("x1", "x2"), ())
    assert out == Rel("R", (c, c))


def test_substitution_avoids_capture():
    out = substitute(f("exists y. R(x,y)"), {"x": Var("y")}, ("x",), ("y",))
    assert isinstance(out, Exists)
    (b,) = out.vars
    assert b != "y"
    assert out.body == Rel("R", (Var("y"), Var(b)))


def test_substitution_outside_target_context():
    with pytest.raises(UnboundVariable):
        substitute(f("P(x)"), {"x": Var("z")}, ("x",), ("y",))


def test_weaken():
    assert weaken(f("P(x)"), ("x",), ("x", "y")) == f("P(x)")
    assert weaken(TOP, (), ("x",)) == TOP
    with pytest.raises(NotASubcontext):
        weaken(f("R(x,y)"), ("x", "y"), ("x",))


@pytest.mark.parametrize(
    "text,frag",
    [
        ("P(x) & Q(x) |-[x] P(x)", Fragment.HORN),
        ("P(x) |-[x] exists y. R(x,y)", Fragment.REGULAR),
        ("P(x) |-[x,y] R(x,y) | Q(x)", Fragment.GEOMETRIC),
    ],
)
def test_fragments(text, frag):
    assert classify_fragment(parse_sequent(text)) == frag


def test_prenex_examples():
    assert prenex(f("P(x)")) == ((), (f("P(x)"),))
    bound, matrix = prenex(f("exists y. R(x,y) & (exists z. R(y,z))"))
    assert bound == ("y", "z")
    assert matrix == (f("R(x,y)", ["x", "y"]), f("R(y,z)", ["y", "z"]))


def test_prenex_pads_unused_bound_variable():
    bound, matrix = prenex(f("exists y. P(x)"))
    assert bound == ("y",)
    assert set(matrix) == {f("P(x)"), f("y = y", ["y"])}


def test_alpha_equivalence():
    assert alpha_eq(f("exists y. R(x,y)"), f("exists z. R(x,z)"))
    assert not alpha_eq(f("exists y. R(x,y)"), f("exists y. R(y,x)"))
    assert free_vars(f("exists y. R(x,y)")) == {"x"}
