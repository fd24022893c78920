"""Hand-written derivations with constants.

``ABSTRACTION`` maps a case name to ``(derivation, constants)``; every
derivation checks against ``THEORY`` (which mentions none of the constants).
``DIAGRAM`` maps a case name to a derivation over ``DT`` plus the diagram of
``DA`` (that combined theory is ``DIAGRAM_THEORY_WITH_DIAGRAM``).
"""

from __future__ import annotations

from chasekit import proofs as P
from chasekit.parsing import parse_formula, parse_structure, parse_theory
from chasekit.semantics import diagram
from chasekit.syntax import App, Conj, Disj, Exists, Rel, Theory, Var, const

THEORY_TEXT = """\
rel P/1
rel Q/1
rel R/2
rel S/2
fun f/1
axiom a1: true |-[x1,x2] R(x1,x2)
axiom a2: true |-[x1] R(x1,x1)
axiom t2: R(x,y) |-[x,y] Q(y)
axiom tp: P(x) |-[x] Q(x)
axiom ts: R(x,y) |-[x,y] S(y,x)
axiom ex: P(x) |-[x] exists y. R(x,y)
"""

THEORY = parse_theory(THEORY_TEXT)
SIG = THEORY.signature.extend(funs={"c": 0, "c1": 0, "c2": 0, "c3": 0})

c, c1, c2, c3 = const("c"), const("c1"), const("c2"), const("c3")
x, y, z = Var("x"), Var("y"), Var("z")


def F(text: str, vars_=None):
    return parse_formula(text, SIG, vars_)


def sub(name, m, ctx=()):
    return P.substitution(P.axiom(THEORY, name), m, ctx)


def _cases():
    out = {}
    # the two worked examples
    out["worked_distinct"] = (sub("a1", {"x1": c1, "x2": c2}), {"c1", "c2"})
    out["worked_diagonal"] = (sub("a2", {"x1": c}), {"c"})
    out["identity"] = (P.identity((), F("P(c)")), {"c"})
    out["identity_repeated"] = (P.identity((), F("R(c,c)")), {"c"})
    out["cut_chain"] = (P.cut(sub("a1", {"x1": c1, "x2": c2}), sub("t2", {"x": c1, "y": c2})), {"c1", "c2"})
    out["cut_collapse"] = (P.cut(sub("a2", {"x1": c}), sub("t2", {"x": c, "y": c})), {"c"})
    out["and_intro"] = (P.and_intro([sub("a1", {"x1": c1, "x2": c2}), sub("a2", {"x1": c2})]), {"c1", "c2"})
    out["and_elim"] = (P.and_elim((), F("R(c1,c2) & P(c3)"), 1), {"c1", "c2", "c3"})
    out["top_intro"] = (P.top_intro((), F("P(c)")), {"c"})
    out["eq_refl"] = (P.eq_refl((), c), {"c"})
    out["eq_subst"] = (
        P.substitution(P.eq_subst(("u", "v"), [("u", "v")], F("P(u)", ["u"])), {"u": c1, "v": c2}, ()),
        {"c1", "c2"},
    )
    out["weaken"] = (P.weaken(P.identity((), F("P(c)")), ("z",)), {"c"})
    out["exists_intro"] = (_ei(F("R(c1,c2)"), F("exists w. R(c1,w)")), {"c1", "c2"})
    out["exists_down"] = (_exists_down(), {"c1"})
    out["frobenius"] = (P.frobenius((), F("P(c1)"), F("exists y. R(c2,y)")), {"c1", "c2"})
    out["or_intro"] = (P.or_intro((), Disj((F("P(c)"), F("Q(c2)"))), 0), {"c", "c2"})
    out["or_elim"] = (
        P.or_elim([sub("tp", {"x": c}), sub("t2", {"x": c1, "y": c})], Disj((F("P(c)"), F("R(c1,c)")))),
        {"c", "c1"},
    )
    out["mixed_context"] = (sub("t2", {"x": x, "y": c}, ("x",)), {"c"})
    out["under_function"] = (sub("tp", {"x": App("f", (c,))}), {"c"})
    out["triple_and"] = (
        P.and_intro([sub("a1", {"x1": c, "x2": c1}), sub("a1", {"x1": c1, "x2": c}), sub("a2", {"x1": c})]),
        {"c", "c1"},
    )
    out["nested_cut"] = (
        P.cut(P.cut(sub("a1", {"x1": c1, "x2": c2}), P.identity((), F("R(c1,c2)"))), sub("ts", {"x": c1, "y": c2})),
        {"c1", "c2"},
    )
    out["identity_cut"] = (P.cut(P.identity((), F("R(c1,c2)")), sub("t2", {"x": c1, "y": c2})), {"c1", "c2"})
    out["existential_axiom"] = (sub("ex", {"x": c}), {"c"})
    out["partial_constants"] = (sub("a1", {"x1": c1, "x2": c2}), {"c1"})
    out["no_constants"] = (P.identity(("x",), F("P(x)", ["x"])), set())
    return out


def _ei(body, ex: Exists):
    """``body |- ex`` where ``body`` is the matrix of ``ex`` at a closed witness."""
    (w,) = ex.vars
    d = P.exists_intro((), ex.body, (w,))
    return P.substitution(d, {w: _witness(ex.body, body, w)}, ())


def _witness(pattern, instance, w):
    for s, t in zip(pattern.args, instance.args):
        if s == Var(w):
            return t
    raise ValueError("no witness")


def _exists_down():
    # exists y. R(c1,y) |- exists w. R(c1,w)
    ex = F("exists w. R(c1,w)")
    d = P.exists_intro((), ex.body, ("w",))  # R(c1,w) |-[w] ex
    d = P.substitution(d, {"w": y}, ("y",))  # R(c1,y) |-[y] ex
    return P.exists_down(d, ("y",))


ABSTRACTION = _cases()


# -- derivations over a theory plus a diagram -----------------------------------------------

DT = parse_theory("rel P/1\nrel Q/1\nrel R/2\naxiom t2: R(x,y) |-[x,y] Q(y)\naxiom tp: P(x) |-[x] Q(x)\n")
DA = parse_structure("rel P/1\nrel Q/1\nrel R/2\ncarrier: a b c\nrel P: (a) (c)\nrel R: (a,b) (b,b) (c,a)\n", DT.signature)


def _with_diagram(T: Theory, A):
    D = diagram(A)
    axioms = dict(T.axioms)
    axioms.update(D.theory.axioms)
    sig = T.signature.extend(funs=D.theory.signature.funs, rels=D.theory.signature.rels)
    return Theory(sig, axioms), D


def _diag_leaf(TD, D, fact: Rel):
    for name, ax in D.theory.axioms.items():
        if ax.cons == fact:
            return P.axiom(TD, name, ())
    raise KeyError(fact)


def _dcases():
    TD, D = _with_diagram(DT, DA)
    k = {e: const(n) for e, n in D.constant_of.items()}
    leaf = lambda sym, *es: _diag_leaf(TD, D, Rel(sym, tuple(k[e] for e in es)))  # noqa: E731
    tsub = lambda name, **m: P.substitution(P.axiom(TD, name), m, tuple(sorted({v for t in m.values() for v in ([t.name] if isinstance(t, Var) else [])})))  # noqa: E731
    out = {}
    out["no_diagram"] = P.identity(("x",), F("P(x)", ["x"]))
    out["spec_example"] = P.cut(leaf("R", "a", "b"), tsub("t2", x=k["a"], y=k["b"]))
    out["loop_constant_twice"] = P.cut(leaf("R", "b", "b"), tsub("t2", x=k["b"], y=k["b"]))
    out["unary"] = P.cut(leaf("P", "a"), tsub("tp", x=k["a"]))
    out["pair"] = P.and_intro([leaf("R", "a", "b"), leaf("R", "c", "a")])
    out["pair_then_elim"] = P.cut(P.and_intro([leaf("R", "a", "b"), leaf("P", "c")]), P.and_elim((), Conj((Rel("R", (k["a"], k["b"])), Rel("P", (k["c"],)))), 1))
    out["chain"] = P.and_intro([P.cut(leaf("R", "c", "a"), tsub("t2", x=k["c"], y=k["a"])), leaf("P", "a")])
    out["with_hypothesis"] = P.cut(P.top_intro(("x",), F("P(x)", ["x"])), P.weaken(leaf("R", "a", "b"), ("x",)))
    out["hypothesis_used"] = P.and_intro([P.identity(("x",), F("P(x)", ["x"])), P.cut(P.top_intro(("x",), F("P(x)", ["x"])), P.weaken(leaf("P", "a"), ("x",)))])
    out["existential_goal"] = P.cut(leaf("R", "b", "b"), _ei(Rel("R", (k["b"], k["b"])), Exists(("w",), Rel("R", (k["b"], Var("w"))))))
    out["same_leaf_twice"] = P.and_intro([leaf("R", "a", "b"), leaf("R", "a", "b")])
    return TD, out


DIAGRAM_THEORY_WITH_DIAGRAM, DIAGRAM = _dcases()
