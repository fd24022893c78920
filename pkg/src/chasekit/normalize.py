"""Normal forms and the theory-level translations that feed the chase.

Pipeline for an arbitrary regular theory: :func:`eliminate_functions`, then
:func:`normalize_theory`, then :func:`eliminate_equality` (whose output is
normalized once more).  Equality must go last because the single-valuedness
axioms produced by function elimination use it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .closure import CongruenceClosure
from .errors import NotFunctional, NotNormal, NotRegular, NotRelational
from .syntax import (
    TOP,
    App,
    Atom,
    Conj,
    Disj,
    Eq,
    Exists,
    Formula,
    Rel,
    Sequent,
    Signature,
    Term,
    Theory,
    Var,
    all_var_names,
    atom_terms,
    classify_fragment,
    conj,
    exists,
    Fragment,
    horn_atoms,
    prenex,
    term_vars,
)

__all__ = [
    "NormalSequent",
    "as_normal",
    "back_translate",
    "eliminate_equality",
    "eliminate_functions",
    "equality_symbol",
    "flatten",
    "graph_symbol",
    "graphs_to_structure",
    "horn_entails",
    "normal_axioms",
    "normalize_sequent",
    "normalize_theory",
    "prenex",
    "structure_of_graphs",
    "to_equality_predicate",
    "unflatten",
]


# -- Horn entailment ------------------------------------------------------------


def _subterms(t: Term, out: list):
    if isinstance(t, App):
        for a in t.args:
            _subterms(a, out)
    out.append(t)


def horn_closure(gamma: Sequence[Atom], extra_terms: Iterable[Term] = ()) -> CongruenceClosure:
    terms: list = []
    for a in gamma:
        for t in atom_terms(a):
            _subterms(t, terms)
    for t in extra_terms:
        _subterms(t, terms)
    cc = CongruenceClosure(terms)
    for a in gamma:
        if isinstance(a, Eq):
            cc.merge(a.lhs, a.rhs)
    return cc


def horn_entails(gamma, alpha: Atom, ctx: Sequence[str] = ()) -> bool:
    """Whether ``gamma |-_ctx alpha`` over the empty theory (congruence closure)."""
    hyps = horn_atoms(gamma) if not isinstance(gamma, (list, tuple)) else tuple(gamma)
    if alpha == TOP:
        return True
    cc = horn_closure(hyps, atom_terms(alpha))
    if isinstance(alpha, Eq):
        return cc.equal(alpha.lhs, alpha.rhs)
    for h in hyps:
        if isinstance(h, Rel) and h.sym == alpha.sym and len(h.args) == len(alpha.args):
            if all(cc.equal(s, t) for s, t in zip(h.args, alpha.args)):
                return True
    return False


# -- normal sequents ------------------------------------------------------------


@dataclass(frozen=True)
class NormalSequent:
    """``antecedent(ctx) |-_ctx exists bound. matrix(ctx, bound)``."""

    ctx: Tuple[str, ...]
    antecedent: Tuple[Atom, ...]
    bound: Tuple[str, ...]
    matrix: Tuple[Atom, ...]

    def to_sequent(self) -> Sequent:
        return Sequent(self.ctx, conj(*self.antecedent), exists(self.bound, conj(*self.matrix)))

    def side_condition_holds(self) -> bool:
        return all(horn_entails(self.matrix, a, self.ctx + self.bound) for a in self.antecedent)


def _dedupe(items) -> tuple:
    return tuple(dict.fromkeys(items))


def normalize_sequent(sigma: Sequent) -> NormalSequent:
    """Hoist antecedent existentials into the context and conjoin the antecedent
    onto the consequent matrix."""
    if isinstance(sigma.cons, Disj) or classify_fragment(sigma) > Fragment.REGULAR:
        raise NotRegular("only regular sequents have a normal form")
    try:
        return as_normal(sigma)
    except NotNormal:
        pass
    avoid = set(sigma.ctx) | all_var_names(sigma.cons)
    hoisted, ante = prenex(sigma.ante, pad=False, avoid=avoid)
    ctx = tuple(sigma.ctx) + hoisted
    bound, cons = prenex(sigma.cons, pad=True, avoid=set(ctx) | all_var_names(sigma.ante))
    ante = tuple(a for a in ante if not _trivial_refl(a))
    return NormalSequent(ctx, _dedupe(ante), bound, _dedupe(ante + cons))


def _trivial_refl(a: Atom) -> bool:
    return isinstance(a, Eq) and a.lhs == a.rhs and isinstance(a.lhs, Var)


def as_normal(sigma: Sequent) -> NormalSequent:
    """Read a sequent that is already in normal shape, checking the side condition."""
    try:
        ante = horn_atoms(sigma.ante)
        body = sigma.cons
        bound: Tuple[str, ...] = ()
        if isinstance(body, Exists):
            bound, body = body.vars, body.body
        matrix = horn_atoms(body)
    except Exception:
        raise NotNormal(f"not of the form Horn |- exists. Horn: {sigma!r}") from None
    if set(bound) & set(sigma.ctx):
        raise NotNormal("bound variables shadow the context")
    ns = NormalSequent(tuple(sigma.ctx), ante, bound, matrix)
    if not ns.side_condition_holds():
        raise NotNormal("matrix does not entail the antecedent")
    return ns


def normal_axioms(T: Theory) -> Dict[str, NormalSequent]:
    out = {}
    for name, s in T.axioms.items():
        try:
            out[name] = as_normal(s)
        except NotNormal as exc:
            raise NotNormal(f"axiom {name}: {exc}") from None
    return out


def normalize_theory(T: Theory) -> Theory:
    return Theory(T.signature, {n: normalize_sequent(s).to_sequent() for n, s in T.axioms.items()})


def is_normal_theory(T: Theory) -> bool:
    try:
        normal_axioms(T)
    except NotNormal:
        return False
    return True


# -- elimination of equality --------------------------------------------------------


def _fresh_symbol(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    if base not in taken:
        return base
    for k in itertools.count():
        if f"{base}{k}" not in taken:
            return f"{base}{k}"


def equality_symbol(sig: Signature) -> str:
    """Name of the predicate standing in for equality (``E`` unless taken)."""
    return _fresh_symbol("E", list(sig.rels) + list(sig.funs))


def to_equality_predicate(phi: Formula, E: str) -> Formula:
    if isinstance(phi, Eq):
        return Rel(E, (phi.lhs, phi.rhs))
    if isinstance(phi, Rel):
        return phi
    if isinstance(phi, (Conj, Disj)):
        return type(phi)(tuple(to_equality_predicate(p, E) for p in phi.parts))
    return Exists(phi.vars, to_equality_predicate(phi.body, E))


def back_translate(phi: Formula, E: str) -> Formula:
    """Replace the predicate ``E`` by equality (inverse of :func:`to_equality_predicate`)."""
    if isinstance(phi, Rel):
        return Eq(phi.args[0], phi.args[1]) if phi.sym == E else phi
    if isinstance(phi, Eq):
        return phi
    if isinstance(phi, (Conj, Disj)):
        return type(phi)(tuple(back_translate(p, E) for p in phi.parts))
    return Exists(phi.vars, back_translate(phi.body, E))


def equivalence_axioms(sig: Signature, E: str, taken: Iterable[str] = ()) -> Dict[str, Sequent]:
    """``E_Sigma``: equivalence plus one congruence axiom per relation symbol."""
    taken = set(taken)
    out: Dict[str, Sequent] = {}

    def put(name, s):
        name = _fresh_symbol(name, taken | set(out))
        out[name] = s

    e = lambda a, b: Rel(E, (Var(a), Var(b)))  # noqa: E731
    put("eq_refl", Sequent(("x",), TOP, e("x", "x")))
    put("eq_sym", Sequent(("x", "y"), e("x", "y"), e("y", "x")))
    put("eq_trans", Sequent(("x", "y", "z"), Conj((e("x", "y"), e("y", "z"))), e("x", "z")))
    for R, n in sig.rels.items():
        if n == 0:
            continue
        xs = [f"x{i + 1}" for i in range(n)]
        ys = [f"y{i + 1}" for i in range(n)]
        ante = Conj(tuple(e(a, b) for a, b in zip(xs, ys)) + (Rel(R, tuple(Var(v) for v in xs)),))
        put(f"eq_cong_{R}", Sequent(tuple(xs + ys), ante, Rel(R, tuple(Var(v) for v in ys))))
    return out


def eliminate_equality(T: Theory, E: str = None) -> Theory:
    """``T^E`` together with ``E_Sigma`` over ``Sigma_E``; the result is equality-free."""
    if not T.signature.relational:
        raise NotRelational("equality elimination needs a relational signature")
    E = E or equality_symbol(T.signature)
    sig = T.signature.extend(rels={E: 2})
    axioms = {
        n: Sequent(s.ctx, to_equality_predicate(s.ante, E), to_equality_predicate(s.cons, E))
        for n, s in T.axioms.items()
    }
    axioms.update(equivalence_axioms(T.signature, E, axioms))
    return Theory(sig, axioms)


# -- elimination of function symbols ------------------------------------------------


def graph_symbol(f: str, taken: Iterable[str] = ()) -> str:
    return _fresh_symbol(f"F_{f}", taken)


def graph_symbols(sig: Signature) -> Dict[str, str]:
    taken = set(sig.rels) | set(sig.funs)
    out = {}
    for f in sig.funs:
        g = graph_symbol(f, taken)
        taken.add(g)
        out[f] = g
    return out


class _Flattener:
    def __init__(self, graphs: Mapping[str, str], avoid: Iterable[str]):
        self.graphs = graphs
        self.used = set(avoid)
        self.counters: Dict[str, int] = {}

    def fresh(self, f: str) -> str:
        while True:
            k = self.counters.get(f, 0)
            self.counters[f] = k + 1
            name = f"z_{f}_{k}"
            if name not in self.used:
                self.used.add(name)
                return name

    def term(self, t: Term, extra: list, bound: list) -> Term:
        if isinstance(t, Var):
            return t
        args = tuple(self.term(a, extra, bound) for a in t.args)
        z = self.fresh(t.sym)
        bound.append(z)
        extra.append(Rel(self.graphs[t.sym], args + (Var(z),)))
        return Var(z)

    def formula(self, phi: Formula) -> Formula:
        if isinstance(phi, (Eq, Rel)):
            extra: list = []
            bound: list = []
            if isinstance(phi, Eq):
                new = Eq(self.term(phi.lhs, extra, bound), self.term(phi.rhs, extra, bound))
            else:
                new = Rel(phi.sym, tuple(self.term(a, extra, bound) for a in phi.args))
            if not bound:
                return phi
            return Exists(tuple(bound), Conj(tuple(extra) + (new,)))
        if isinstance(phi, (Conj, Disj)):
            return type(phi)(tuple(self.formula(p) for p in phi.parts))
        return Exists(phi.vars, self.formula(phi.body))


def flatten(phi: Formula, graphs: Mapping[str, str], avoid: Iterable[str] = ()) -> Formula:
    """Replace every term ``f(t...)`` (innermost, leftmost first) by a fresh
    existential ``z_f_k`` constrained by ``F_f(t..., z_f_k)``."""
    return _Flattener(graphs, set(avoid) | all_var_names(phi)).formula(phi)


def unflatten(phi: Formula, graphs: Mapping[str, str]) -> Formula:
    """Read graph atoms ``F_f(xs, z)`` back as ``f(xs) = z``."""
    inverse = {g: f for f, g in graphs.items()}
    if isinstance(phi, Rel):
        if phi.sym in inverse:
            return Eq(App(inverse[phi.sym], phi.args[:-1]), phi.args[-1])
        return phi
    if isinstance(phi, Eq):
        return phi
    if isinstance(phi, (Conj, Disj)):
        return type(phi)(tuple(unflatten(p, graphs) for p in phi.parts))
    return Exists(phi.vars, unflatten(phi.body, graphs))


def functionality_axioms(sig: Signature, graphs: Mapping[str, str]) -> Dict[str, Sequent]:
    """``F_Sigma``: every graph predicate is total and single-valued."""
    out: Dict[str, Sequent] = {}
    for f, n in sig.funs.items():
        g = graphs[f]
        xs = tuple(f"x{i + 1}" for i in range(n))
        args = tuple(Var(x) for x in xs)
        out[f"fn_total_{f}"] = Sequent(xs, TOP, Exists(("z",), Rel(g, args + (Var("z"),))))
        out[f"fn_single_{f}"] = Sequent(
            xs + ("z", "z1"),
            Conj((Rel(g, args + (Var("z"),)), Rel(g, args + (Var("z1"),)))),
            Eq(Var("z"), Var("z1")),
        )
    return out


def relational_signature(sig: Signature, graphs: Mapping[str, str]) -> Signature:
    rels = dict(sig.rels)
    for f, n in sig.funs.items():
        rels[graphs[f]] = n + 1
    return Signature({}, rels)


def translate_sequent(s: Sequent, graphs: Mapping[str, str]) -> Sequent:
    avoid = set(s.ctx)
    return Sequent(s.ctx, flatten(s.ante, graphs, avoid), flatten(s.cons, graphs, avoid))


def eliminate_functions(T: Theory) -> Tuple[Signature, Theory]:
    """Relational signature and theory: ``normalize(F_Sigma + flattened axioms)``.

    A relational input is returned unchanged.
    """
    if T.signature.relational:
        return T.signature, T
    graphs = graph_symbols(T.signature)
    sig = relational_signature(T.signature, graphs)
    axioms = dict(functionality_axioms(T.signature, graphs))
    for name, s in T.axioms.items():
        key = _fresh_symbol(name, axioms)
        axioms[key] = translate_sequent(s, graphs)
    return sig, normalize_theory(Theory(sig, axioms))


# -- structures of graphs ---------------------------------------------------------


def structure_of_graphs(A, graphs: Mapping[str, str] = None):
    """Replace each function table by its graph relation."""
    from .semantics import Structure

    graphs = graphs or graph_symbols(A.signature)
    sig = relational_signature(A.signature, graphs)
    rels = {s: set(t) for s, t in A.rels.items()}
    for f, table in A.funs.items():
        rels[graphs[f]] = {args + (v,) for args, v in table.items()}
    return Structure(sig, A.carrier, rels)


def graphs_to_structure(B, signature: Signature, graphs: Mapping[str, str] = None):
    """Inverse of :func:`structure_of_graphs`; graph tables must be total and single-valued."""
    from .semantics import Structure

    graphs = graphs or graph_symbols(signature)
    funs = {}
    for f, n in signature.funs.items():
        table: Dict[tuple, object] = {}
        for t in B.rels[graphs[f]]:
            args, v = t[:-1], t[-1]
            if args in table and table[args] != v:
                raise NotFunctional(f"{graphs[f]} is not single-valued at {args}")
            table[args] = v
        for args in itertools.product(B.carrier, repeat=n):
            if args not in table:
                raise NotFunctional(f"{graphs[f]} is not total: nothing at {args}")
        funs[f] = table
    rels = {s: B.rels[s] for s in signature.rels}
    return Structure(signature, B.carrier, rels, funs)
