"""Abstracting constants into variables, and derivations from diagrams.

``abstract_constants`` follows the derivation tree bottom up.  Logical
axiom leaves get one fresh variable per occurrence of a designated constant
in the schematic parts of the axiom; substitution nodes abstract the
substituted terms; multi-premise nodes identify the variables that sit in
corresponding places of the shared formula.  Identifications are pushed into
the premises as a renaming, and contexts are enlarged in place, so the
output uses exactly the same rules as the input.

Designated constants are only ever tested for membership in ``C``.  The
assignment built along the way holds them in :class:`Opaque` boxes whose
equality is disabled, so two occurrences can never be identified by
comparing the constants themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .closure import UnionFind
from .errors import CheckFailed, ConstantInTheory, IllFormedDerivation, NotSatisfied
from .proofs import (
    Derivation,
    and_elim,
    and_intro,
    check_derivation,
    cut,
    eq_subst,
    exists_down,
    exists_intro,
    frobenius,
    substitution,
    weaken,
)
from .prover import HornProver, Names, derive_from_facts, project, seq
from .semantics import Structure, diagram, evaluate
from .syntax import (
    TOP,
    App,
    Conj,
    Disj,
    Eq,
    Exists,
    Formula,
    Rel,
    Sequent,
    Term,
    Theory,
    Var,
    all_var_names,
    conj,
    exists,
    free_var_list,
    is_atom,
    subst,
    subst_term,
)


class Opaque:
    """A designated constant that refuses to be compared."""

    __slots__ = ("term",)

    def __init__(self, term: App):
        self.term = term

    def __eq__(self, other):
        raise TypeError("designated constants are opaque during abstraction")

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"Opaque({self.term.sym})"


@dataclass
class Abstraction:
    fresh_context: Tuple[str, ...]
    assignment: Dict[str, App]
    derivation: Derivation

    def root_instance(self) -> Sequent:
        """The abstracted root with the assignment substituted back."""
        s = self.derivation.conclusion
        ctx = tuple(v for v in s.ctx if v not in self.assignment)
        return Sequent(ctx, subst(s.ante, self.assignment), subst(s.cons, self.assignment))


# -- tree utilities --------------------------------------------------------------------


def _all_names(d: Derivation) -> set:
    out = set()
    for _, n in d.nodes():
        out.update(n.ctx)
        out |= all_var_names(n.ante) | all_var_names(n.cons)
        if n.rule == "Substitution":
            for v, t in n.payload:
                out.add(v)
                out |= all_var_names(Eq(t, t))
        if n.rule == "ExistsAdjunction":
            out.update(n.payload[1])
    return out


def _constants_in_term(t: Term, out: list) -> None:
    if isinstance(t, App):
        if not t.args:
            out.append(t.sym)
        for a in t.args:
            _constants_in_term(a, out)


def constants_of(phi: Formula) -> List[str]:
    """Nullary function symbols in order of occurrence (with repeats)."""
    out: list = []
    for a in _atoms_in_order(phi):
        for t in (a.args if isinstance(a, Rel) else (a.lhs, a.rhs)):
            _constants_in_term(t, out)
    return out


def _atoms_in_order(phi):
    if is_atom(phi):
        yield phi
    elif isinstance(phi, (Conj, Disj)):
        for p in phi.parts:
            yield from _atoms_in_order(p)
    else:
        yield from _atoms_in_order(phi.body)


def rename_tree(d: Derivation, ren: Mapping[str, str]) -> Derivation:
    """Rename free occurrences of the given variables everywhere in ``d``."""
    if not ren:
        return d
    m = {k: Var(v) for k, v in ren.items()}
    memo: Dict[int, Derivation] = {}

    def go(n: Derivation) -> Derivation:
        if id(n) in memo:
            return memo[id(n)]
        ctx = tuple(dict.fromkeys(ren.get(v, v) for v in n.ctx))
        s = Sequent(ctx, subst(n.ante, m), subst(n.cons, m))
        payload = n.payload
        if n.rule == "Substitution":
            items = {}
            for v, t in payload:
                items[ren.get(v, v)] = subst_term(t, m)
            payload = tuple(sorted(items.items()))
        out = Derivation(n.rule, s, tuple(go(c) for c in n.children), payload)
        memo[id(n)] = out
        return out

    return go(d)


def extend_context(d: Derivation, extra: Sequence[str]) -> Derivation:
    """Add variables that occur nowhere in ``d`` to its contexts.

    The extension stops at substitution and weakening nodes, whose premises
    may live in a smaller context.
    """
    extra = tuple(v for v in extra if v not in d.ctx)
    if not extra:
        return d
    s = Sequent(tuple(d.ctx) + extra, d.ante, d.cons)
    if d.rule in ("Substitution", "Weaken"):
        return Derivation(d.rule, s, d.children, d.payload)
    if d.rule == "ExistsAdjunction" and d.payload[0] == "up":
        return Derivation(d.rule, s, tuple(extend_context(c, extra) for c in d.children), d.payload)
    return Derivation(d.rule, s, tuple(extend_context(c, extra) for c in d.children), d.payload)


# -- abstraction ---------------------------------------------------------------------------


class _Abstractor:
    def __init__(self, d: Derivation, C: Iterable[str]):
        self.C = frozenset(C)
        self.names = Names(_all_names(d) | set(self.C))
        self.f: Dict[str, Opaque] = {}
        self.order: List[str] = []

    def fresh(self, const: App, path) -> Var:
        # path-derived stem, renumbered at the end
        y = self.names.fresh("y_" + "_".join(str(i) for i in path) + "_" if path else "y_")
        self.f[y] = Opaque(const)
        self.order.append(y)
        return Var(y)

    # occurrence-level replacement

    def term(self, t: Term, path, counter) -> Term:
        if isinstance(t, App):
            if not t.args and t.sym in self.C:
                counter[0] += 1
                return self.fresh(t, path + (counter[0],))
            return App(t.sym, tuple(self.term(a, path, counter) for a in t.args))
        return t

    def formula(self, phi: Formula, path, counter) -> Formula:
        if isinstance(phi, Eq):
            return Eq(self.term(phi.lhs, path, counter), self.term(phi.rhs, path, counter))
        if isinstance(phi, Rel):
            return Rel(phi.sym, tuple(self.term(a, path, counter) for a in phi.args))
        if isinstance(phi, Conj):
            return Conj(tuple(self.formula(p, path, counter) for p in phi.parts))
        if isinstance(phi, Disj):
            return Disj(tuple(self.formula(p, path, counter) for p in phi.parts))
        return Exists(phi.vars, self.formula(phi.body, path, counter))

    def fresh_in(self, *formulas) -> List[str]:
        out = []
        for phi in formulas:
            for v in free_var_list(phi):
                if v in self.f and v not in out:
                    out.append(v)
        return out

    # transport of abstracted positions onto the original conclusion

    def transport_term(self, o: Term, a: Term) -> Term:
        if isinstance(o, App):
            if not o.args and o.sym in self.C:
                if not (isinstance(a, Var) and a.name in self.f):
                    raise IllFormedDerivation("designated constant not abstracted")
                return a
            if not isinstance(a, App) or a.sym != o.sym or len(a.args) != len(o.args):
                raise IllFormedDerivation("abstracted formula does not match the original")
            return App(o.sym, tuple(self.transport_term(x, y) for x, y in zip(o.args, a.args)))
        return o

    def transport(self, o: Formula, a: Formula) -> Formula:
        if type(o) is not type(a):
            raise IllFormedDerivation("abstracted formula does not match the original")
        if isinstance(o, Eq):
            return Eq(self.transport_term(o.lhs, a.lhs), self.transport_term(o.rhs, a.rhs))
        if isinstance(o, Rel):
            return Rel(o.sym, tuple(self.transport_term(x, y) for x, y in zip(o.args, a.args)))
        if isinstance(o, (Conj, Disj)):
            if len(o.parts) != len(a.parts):
                raise IllFormedDerivation("abstracted formula does not match the original")
            return type(o)(tuple(self.transport(x, y) for x, y in zip(o.parts, a.parts)))
        if len(o.vars) != len(a.vars):
            raise IllFormedDerivation("abstracted formula does not match the original")
        # bring the abstracted body to the original binder names
        body = subst(a.body, {v: Var(w) for v, w in zip(a.vars, o.vars)})
        return Exists(o.vars, self.transport(o.body, body))

    def corresponding(self, a: Formula, b: Formula, uf: UnionFind) -> None:
        """Identify fresh variables in matching places of two abstractions."""
        if type(a) is not type(b):
            raise IllFormedDerivation("shared formulas do not correspond")
        if isinstance(a, Eq):
            pairs = [(a.lhs, b.lhs), (a.rhs, b.rhs)]
        elif isinstance(a, Rel):
            pairs = list(zip(a.args, b.args))
        elif isinstance(a, (Conj, Disj)):
            for x, y in zip(a.parts, b.parts):
                self.corresponding(x, y, uf)
            return
        else:
            body = subst(b.body, {v: Var(w) for v, w in zip(b.vars, a.vars)})
            self.corresponding(a.body, body, uf)
            return
        for s, t in pairs:
            self._corr_term(s, t, uf)

    def _corr_term(self, s: Term, t: Term, uf: UnionFind) -> None:
        sf = isinstance(s, Var) and s.name in self.f
        tf = isinstance(t, Var) and t.name in self.f
        if sf and tf:
            uf.union(s.name, t.name)
        elif sf or tf:
            raise IllFormedDerivation("a designated constant meets a different term")
        elif isinstance(s, App) and isinstance(t, App):
            for x, y in zip(s.args, t.args):
                self._corr_term(x, y, uf)

    # the induction

    def run(self, node: Derivation, path=()) -> Derivation:
        r = node.rule
        s = node.conclusion
        if r == "TheoryAxiom":
            return node
        if r in ("Identity", "AndElim", "TopIntro", "EqRefl", "EqSubst", "Frobenius", "OrIntro"):
            rebuilt = self.leaf(node, path)
            return self._finish(node, rebuilt, ())
        kids = [self.run(c, path + (i,)) for i, c in enumerate(node.children)]
        if r == "Substitution":
            (c,) = kids
            counter = [0]
            m = {v: self.term(t, path, counter) for v, t in node.payload}
            for y in self.fresh_in(c.ante, c.cons) + [v for v in c.ctx if v in self.f]:
                m.setdefault(y, Var(y))
            new_vars = [y for t in m.values() for y in free_var_list(Eq(t, t)) if y in self.f]
            ctx = tuple(dict.fromkeys(tuple(s.ctx) + tuple(new_vars)))
            rebuilt = Derivation(r, Sequent(ctx, subst(c.ante, m), subst(c.cons, m)), (c,),
                                 tuple(sorted(m.items())))
            return self._finish(node, rebuilt, ())
        if r == "Weaken":
            (c,) = kids
            ctx = tuple(s.ctx) + tuple(v for v in c.ctx if v in self.f)
            return self._finish(node, Derivation(r, Sequent(ctx, c.ante, c.cons), (c,)), ())
        if r == "ExistsAdjunction":
            (c,) = kids
            direction, vs = node.payload
            extra = tuple(v for v in c.ctx if v in self.f)
            if direction == "down":
                seqt = Sequent(tuple(s.ctx) + extra, Exists(tuple(vs), c.ante), c.cons)
            else:
                if not isinstance(c.ante, Exists):
                    raise IllFormedDerivation("premise of an up adjunction must be existential")
                body = subst(c.ante.body, {v: Var(w) for v, w in zip(c.ante.vars, vs)})
                seqt = Sequent(tuple(s.ctx) + extra, body, c.cons)
            return self._finish(node, Derivation(r, seqt, (c,), node.payload), ())
        if r in ("Cut", "AndIntro", "OrElim"):
            uf = UnionFind()
            if r == "Cut":
                self.corresponding(kids[0].cons, kids[1].ante, uf)
            elif r == "AndIntro":
                for k in kids[1:]:
                    self.corresponding(kids[0].ante, k.ante, uf)
            else:
                for k in kids[1:]:
                    self.corresponding(kids[0].cons, k.cons, uf)
            ren = {}
            for cls in uf.classes():
                rep = min(cls, key=self.order.index)
                for v in cls:
                    if v != rep:
                        ren[v] = rep
            kids = [rename_tree(k, ren) for k in kids]
            for v in ren:
                self.f.pop(v, None)
            fresh = list(dict.fromkeys(v for k in kids for v in k.ctx if v in self.f))
            kids = [extend_context(k, fresh) for k in kids]
            ctx = tuple(s.ctx) + tuple(fresh)
            if r == "Cut":
                seqt = Sequent(ctx, kids[0].ante, kids[1].cons)
            elif r == "AndIntro":
                seqt = Sequent(ctx, kids[0].ante, Conj(tuple(k.cons for k in kids)))
            else:
                seqt = Sequent(ctx, Disj(tuple(k.ante for k in kids)), kids[0].cons)
            return self._finish(node, Derivation(r, seqt, tuple(kids), node.payload), ())
        raise IllFormedDerivation(f"cannot abstract rule {r}")

    def leaf(self, node: Derivation, path) -> Derivation:
        r, s, p = node.rule, node.conclusion, node.payload
        counter = [0]
        F = lambda phi: self.formula(phi, path, counter)  # noqa: E731
        if r == "Identity":
            phi = F(s.ante)
            a, c = phi, phi
        elif r == "AndElim":
            a = F(s.ante)
            c = a.parts[p]
        elif r == "TopIntro":
            a, c = F(s.ante), TOP
        elif r == "EqRefl":
            t = self.term(s.cons.lhs, path, counter)
            a, c = TOP, Eq(t, t)
        elif r == "EqSubst":
            theta = F(s.ante.parts[p])
            pairs = [(e.lhs.name, e.rhs.name) for e in s.ante.parts[:p]]
            d = eq_subst((), pairs, theta)
            a, c = d.ante, d.cons
        elif r == "Frobenius":
            a = F(s.ante)
            phi, ex = a.parts
            c = Exists(ex.vars, Conj((phi, ex.body)))
        else:  # OrIntro
            c = F(s.cons)
            a = c.parts[p]
        new = self.fresh_in(a, c)
        return Derivation(r, Sequent(tuple(s.ctx) + tuple(new), a, c), (), p)

    def _finish(self, orig: Derivation, rebuilt: Derivation, _unused) -> Derivation:
        s = orig.conclusion
        ante = self.transport(s.ante, rebuilt.ante)
        cons = self.transport(s.cons, rebuilt.cons)
        extra = [v for v in rebuilt.ctx if v in self.f and v not in s.ctx]
        ctx = tuple(s.ctx) + tuple(dict.fromkeys(extra))
        return Derivation(rebuilt.rule, Sequent(ctx, ante, cons), rebuilt.children, rebuilt.payload)


def abstract_constants(d: Derivation, C: Iterable[str], T: Theory, check: bool = True) -> Abstraction:
    """Replace the designated constants ``C`` in ``d`` by fresh variables."""
    C = frozenset(C)
    for c in sorted(C):
        if T.mentions(c):
            raise ConstantInTheory(f"theory mentions designated constant {c}")
    if check:
        res = check_derivation(d, T)
        if not res:
            raise IllFormedDerivation(str(res))
    ab = _Abstractor(d, C)
    out = ab.run(d)
    # final renumbering: y1, y2, ... in order of appearance at the root
    s = out.conclusion
    order = ab.fresh_in(s.ante, s.cons) + [v for v in s.ctx if v in ab.f]
    order = list(dict.fromkeys(order))
    names = Names(_all_names(d) | set(C))
    ren = {}
    for i, v in enumerate(order, 1):
        want = f"y{i}"
        ren[v] = want if want not in names.used else names.fresh("y")
        names.avoid([ren[v]])
    out = rename_tree(out, ren)
    assignment = {ren[v]: ab.f[v].term for v in order}
    fresh = tuple(ren[v] for v in order)
    return Abstraction(fresh, assignment, out)


# -- diagrams ---------------------------------------------------------------------------------


def _diagram_facts(D):
    from .proofs import axiom

    facts = []
    for name, ax in D.theory.axioms.items():
        facts.append((ax.cons, (lambda name=name: axiom(D.theory, name, ()))))
    return facts


def derive_from_diagram(A: Structure, phi: Formula, args: Sequence[Any], ctx: Optional[Sequence[str]] = None,
                        names: Optional[Mapping[Any, str]] = None):
    """A derivation of ``true |- phi(c_args)`` from the diagram of ``A``.

    Returns ``(derivation, diagram)``; check the derivation against
    ``diagram.theory``.
    """
    ctx = tuple(ctx) if ctx is not None else free_var_list(phi)
    env = dict(zip(ctx, args))
    if not evaluate(A, phi, env):
        raise NotSatisfied("the structure does not satisfy the formula at these arguments")
    D = diagram(A, names)
    inst = subst(phi, {v: App(D.constant_of[a], ()) for v, a in env.items()})
    return derive_from_facts(_diagram_facts(D), inst, ()), D


def _discharge(node: Derivation, xi: Formula, diag: set) -> Derivation:
    """``xi & A |- B`` from a derivation of ``A |- B`` whose diagram leaves are conjuncts of ``xi``."""
    G = node.ctx
    L = Conj((xi, node.ante))
    r = node.rule
    if r == "TheoryAxiom" and node.payload in diag:
        return seq(and_elim(G, L, 0), project(G, xi, node.cons))
    if not node.children:
        return cut(and_elim(G, L, 1), node)
    kids = [_discharge(c, xi, diag) for c in node.children]
    if r == "Cut":
        d1, d2 = kids
        mid = and_intro([and_elim(G, L, 0), d1])
        return cut(mid, d2)
    if r == "AndIntro":
        return and_intro(kids)
    if r == "Substitution":
        return substitution(kids[0], dict(node.payload), G)
    if r == "Weaken":
        return weaken(kids[0], G)
    if r == "ExistsAdjunction":
        direction, vs = node.payload
        vs = tuple(vs)
        (k,) = kids
        if direction == "down":
            fr = frobenius(G, xi, node.ante)
            return cut(fr, exists_down(k, vs))
        small = tuple(v for v in G if v not in vs)
        intro = exists_intro(small, node.ante, vs)
        mid = and_intro([and_elim(G, L, 0), cut(and_elim(G, L, 1), intro)])
        return cut(mid, weaken(k, G))
    raise IllFormedDerivation(f"cannot discharge diagram axioms through {r}")


def _positions(orig: Formula, abst: Formula, C: frozenset) -> List[Tuple[str, str]]:
    """Pairs ``(constant, variable)`` at corresponding places."""
    out: List[Tuple[str, str]] = []

    def term(o, a):
        if isinstance(o, App):
            if not o.args and o.sym in C:
                out.append((o.sym, a.name))
                return
            for x, y in zip(o.args, a.args):
                term(x, y)

    def form(o, a):
        if isinstance(o, Eq):
            term(o.lhs, a.lhs)
            term(o.rhs, a.rhs)
        elif isinstance(o, Rel):
            for x, y in zip(o.args, a.args):
                term(x, y)
        elif isinstance(o, (Conj, Disj)):
            for x, y in zip(o.parts, a.parts):
                form(x, y)
        else:
            form(o.body, subst(a.body, {v: Var(w) for v, w in zip(a.vars, o.vars)}))

    form(orig, abst)
    return out


def _holes(phi: Formula, C: frozenset, names: Names) -> Tuple[Formula, List[str]]:
    """``phi`` with each occurrence of a constant from ``C`` replaced by its own variable."""
    holes: List[str] = []

    def term(t):
        if isinstance(t, App):
            if not t.args and t.sym in C:
                u = names.fresh("u")
                holes.append(u)
                return Var(u)
            return App(t.sym, tuple(term(a) for a in t.args))
        return t

    def form(f):
        if isinstance(f, Eq):
            return Eq(term(f.lhs), term(f.rhs))
        if isinstance(f, Rel):
            return Rel(f.sym, tuple(term(a) for a in f.args))
        if isinstance(f, (Conj, Disj)):
            return type(f)(tuple(form(p) for p in f.parts))
        return Exists(f.vars, form(f.body))

    return form(phi), holes


@dataclass
class DiagramElimination:
    chi: Formula
    fresh_context: Tuple[str, ...]
    phi: Formula
    psi: Formula
    assignment: Dict[str, Any]
    proof: Derivation
    abstraction: Abstraction


def eliminate_diagram_constants(d: Derivation, A: Structure, T: Theory,
                                names: Optional[Mapping[Any, str]] = None) -> DiagramElimination:
    """Trade the diagram axioms used in ``d`` for a regular formula over new variables."""
    D = diagram(A, names)
    clash = set(D.theory.axioms) & set(T.axioms)
    if clash:
        raise ValueError(f"axiom names shared with the diagram: {sorted(clash)}")
    C = frozenset(D.constant_of.values())
    TD = Theory(T.signature.extend(funs=D.signature.funs, rels=D.signature.rels),
                {**dict(T.axioms), **dict(D.theory.axioms)})
    res = check_derivation(d, TD)
    if not res:
        raise CheckFailed(str(res))
    diag_names = set(D.theory.axioms)
    used = [n for n in d.axioms_used() if n in diag_names]
    xi = conj(*dict.fromkeys(D.theory.axioms[n].cons for n in used))
    xi = xi if used else TOP
    d1 = _discharge(d, xi, set(used))
    ab = abstract_constants(d1, C, T)
    root = ab.derivation.conclusion
    xi_bar, phi_bar = root.ante.parts
    psi_bar = root.cons
    phi0, psi0 = d.ante, d.cons
    x = tuple(d.ctx)

    pool = Names(_all_names(ab.derivation) | set(C))
    const_order = list(dict.fromkeys(constants_of(phi0) + constants_of(psi0)))
    const_order = [c for c in const_order if c in C]
    ys = {c: pool.fresh("y") for c in const_order}
    to_y = {c: Var(v) for c, v in ys.items()}

    def name_consts(f):
        return _replace_consts(f, to_y)

    phi_y, psi_y = name_consts(phi0), name_consts(psi0)
    pos_phi = _positions(phi0, phi_bar, C)
    pos_psi = _positions(psi0, psi_bar, C)
    rho = list(dict.fromkeys(Eq(Var(ys[c]), Var(v)) for c, v in pos_phi + pos_psi))
    V = tuple(ab.fresh_context)
    B = conj(*rho, xi_bar) if (rho or xi_bar != TOP) else TOP
    if xi_bar == TOP and rho:
        B = conj(*rho)
    chi = exists(V, B)
    ctx0 = x + tuple(ys[c] for c in const_order)
    ctx1 = ctx0 + V

    L = Conj((chi, phi_y))
    if V:
        Hyp = Conj((phi_y, B))
        swap = project(ctx0, L, Conj((phi_y, chi)))
        opener = seq(swap, frobenius(ctx0, phi_y, chi))
    else:
        Hyp = L
        opener = None
    hp = HornProver(Hyp, ctx1, [], pool)

    # phi_bar from phi_y by rewriting the named constants
    theta, holes = _holes(phi0, C, pool)
    if holes:
        pairs = [(u, v) for u, (_, v) in zip(holes, pos_phi)]
        es = eq_subst(ctx1 + tuple(holes), pairs, theta)
        m = {w: Var(w) for w in ctx1}
        m.update({u: Var(ys[c]) for u, (c, _) in zip(holes, pos_phi)})
        sub = substitution(es, m, ctx1)
        pre = project(ctx1, Hyp, sub.ante)
        get_phi = seq(pre, sub)
    else:
        get_phi = project(ctx1, Hyp, phi_bar)
    get_xi = project(ctx1, Hyp, xi_bar)
    both = and_intro([get_xi, get_phi])
    main = seq(both, weaken(ab.derivation, ctx1))

    # psi_y from psi_bar, rewriting back along the symmetric equalities
    theta2, holes2 = _holes(psi0, C, pool)
    if holes2:
        pairs = [(u, ys[c]) for u, (c, _) in zip(holes2, pos_psi)]
        es = eq_subst(ctx1 + tuple(holes2), pairs, theta2)
        m = {w: Var(w) for w in ctx1}
        m.update({u: Var(v) for u, (_, v) in zip(holes2, pos_psi)})
        sub = substitution(es, m, ctx1)
        eqs = [hp.symm(project(ctx1, Hyp, Eq(Var(ys[c]), Var(v)))) for c, v in pos_psi]
        main = cut(and_intro(eqs + [main]), sub)
    body = exists_down(main, V) if V else main
    proof = seq(opener, body) if opener is not None else body

    assignment = {ys[c]: next(e for e, k in D.constant_of.items() if k == c) for c in const_order}
    if not evaluate(A, chi, assignment):
        raise CheckFailed("the structure does not satisfy the extracted formula")
    res = check_derivation(proof, T)
    if not res:
        raise CheckFailed(f"rebuilt derivation does not check: {res}")
    return DiagramElimination(chi, tuple(ys[c] for c in const_order), phi_y, psi_y, assignment, proof, ab)


def _replace_consts(phi: Formula, m: Mapping[str, Term]) -> Formula:
    def term(t):
        if isinstance(t, App):
            if not t.args and t.sym in m:
                return m[t.sym]
            return App(t.sym, tuple(term(a) for a in t.args))
        return t

    def form(f):
        if isinstance(f, Eq):
            return Eq(term(f.lhs), term(f.rhs))
        if isinstance(f, Rel):
            return Rel(f.sym, tuple(term(a) for a in f.args))
        if isinstance(f, (Conj, Disj)):
            return type(f)(tuple(form(p) for p in f.parts))
        return Exists(f.vars, form(f.body))

    return form(phi)
