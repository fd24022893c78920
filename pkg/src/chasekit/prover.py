"""A bounded, proof-producing prover for regular sequents.

The search is a syntactic chase: the antecedent is opened into a list of
atomic hypotheses, theory axioms are fired round by round (skipping
instances whose consequent already follows), and after every round the goal
is looked up in the Horn closure of the hypotheses.  Once the goal is found
the firings that were not needed are dropped and a derivation is built from
the remaining ones.  Equational steps are explained by replaying the
congruence closure with ``EqSubst``.
"""

from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .closure import CongruenceClosure
from .errors import NotRegular, ProofSearchFailed
from .proofs import (
    Derivation,
    and_elim,
    and_intro,
    axiom,
    cut,
    eq_refl,
    eq_subst,
    exists_down,
    exists_intro,
    frobenius,
    identity,
    substitution,
    top_intro,
)
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
    Term,
    Theory,
    Var,
    all_var_names,
    alpha_eq,
    atom_terms,
    conj,
    free_vars,
    fresh_var,
    is_atom,
    subst,
    subst_term,
    term_vars,
)

SEARCH_LIMIT = 20000
FACT_LIMIT = 4000


class Names:
    """Supply of fresh variable names."""

    def __init__(self, avoid=()):
        self.used = set(avoid)

    def fresh(self, base: str) -> str:
        v = fresh_var(base, self.used)
        self.used.add(v)
        return v

    def avoid(self, names) -> None:
        self.used.update(names)


def seq(a: Derivation, b: Derivation) -> Derivation:
    """Cut, skipping identity premises."""
    if a.rule == "Identity":
        return b
    if b.rule == "Identity":
        return a
    return cut(a, b)


def project(ctx, src: Formula, target: Formula) -> Optional[Derivation]:
    """``src |- target`` when ``target`` is assembled from conjuncts of ``src``."""
    if alpha_eq(src, target):
        return identity(ctx, src)
    if target == TOP:
        return top_intro(ctx, src)
    if isinstance(target, Conj):
        parts = [project(ctx, src, p) for p in target.parts]
        if any(p is None for p in parts):
            return None
        return and_intro(parts)
    if isinstance(src, Conj):
        for i, p in enumerate(src.parts):
            r = project(ctx, p, target)
            if r is not None:
                return seq(and_elim(ctx, src, i), r)
    return None


def rename_bound(phi: Formula, names: Names) -> Formula:
    """Give every bound variable a new, globally unused name."""
    if is_atom(phi):
        return phi
    if isinstance(phi, Conj):
        return Conj(tuple(rename_bound(p, names) for p in phi.parts))
    if isinstance(phi, Disj):
        return Disj(tuple(rename_bound(p, names) for p in phi.parts))
    new = tuple(names.fresh(v) for v in phi.vars)
    body = subst(phi.body, {v: Var(n) for v, n in zip(phi.vars, new)})
    return Exists(new, rename_bound(body, names))


def _flat_parts(phi: Formula) -> List[Formula]:
    if isinstance(phi, Conj):
        out = []
        for p in phi.parts:
            out.extend(_flat_parts(p))
        return out
    return [phi]


Wrap = Callable[[Derivation], Derivation]


def _apart(ex: Exists, ctx, taken, names: Names):
    """Bound variables of ``ex`` made distinct from ``ctx`` and ``taken``.

    Names are kept when possible so that opening the same formula twice in
    the same context yields the same variables.
    """
    if set(ex.vars) & (set(ctx) | set(taken)) or len(set(ex.vars)) != len(ex.vars):
        new = tuple(names.fresh(v) for v in ex.vars)
        return new, subst(ex.body, {v: Var(n) for v, n in zip(ex.vars, new)})
    names.avoid(ex.vars)
    return ex.vars, ex.body


def open_hypothesis(phi: Formula, ctx: Sequence[str], names: Names) -> Tuple[List[str], List[Atom], Wrap]:
    """Turn ``phi`` into atoms over a larger context.

    Returns ``(new_vars, atoms, wrap)`` where ``wrap`` takes a derivation of
    ``conj(atoms) |-[ctx,new_vars] psi`` (``psi`` over ``ctx``) to one of
    ``phi |-[ctx] psi``.
    """
    ctx = tuple(ctx)
    if is_atom(phi):
        return [], [phi], lambda p: p
    if isinstance(phi, Disj):
        raise NotRegular("cannot open a disjunctive hypothesis")
    if isinstance(phi, Exists):
        new, body = _apart(phi, ctx, (), names)
        inner_vars, atoms, w = open_hypothesis(body, ctx + new, names)
        return list(new) + inner_vars, atoms, lambda p: exists_down(w(p), new)
    flat = [p for p in _flat_parts(phi) if p != TOP]
    if all(is_atom(p) for p in flat):
        atoms = list(dict.fromkeys(flat))
        pr = project(ctx, phi, conj(*atoms))
        return [], atoms, lambda p: seq(pr, p)
    i = next(k for k, p in enumerate(flat) if isinstance(p, Exists))
    ex = flat[i]
    rest = flat[:i] + flat[i + 1 :]
    taken = set()
    for p in rest:
        taken |= free_vars(p)
    new, body = _apart(ex, ctx, taken, names)
    ex = Exists(new, body)
    if not rest:
        pr = project(ctx, phi, ex)
        vs, atoms, w = open_hypothesis(ex, ctx, names)
        return vs, atoms, lambda p: seq(pr, w(p))
    R = conj(*rest)
    mid = Conj((R, ex))
    pr = project(ctx, phi, mid)
    fr = frobenius(ctx, R, ex)
    nxt = Exists(new, Conj((R, ex.body)))
    vs, atoms, w = open_hypothesis(nxt, ctx, names)
    return vs, atoms, lambda p: seq(seq(pr, fr), w(p))


# -- Horn reasoning with proofs ------------------------------------------------------


def _term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(_term_size(a) for a in t.args)


def _subterms(t: Term, out: set) -> None:
    out.add(t)
    if isinstance(t, App):
        for a in t.args:
            _subterms(a, out)


class HornProver:
    """Derivations ``base |-[ctx] alpha`` for consequences of atomic facts.

    ``facts`` pairs each atom with a thunk producing ``base |-[ctx] atom``.
    """

    def __init__(self, base: Formula, ctx: Sequence[str], facts: Sequence[Tuple[Atom, Callable[[], Derivation]]],
                 names: Optional[Names] = None):
        self.base = base
        self.ctx = tuple(ctx)
        self.names = names or Names(set(self.ctx) | all_var_names(base))
        self.facts = list(facts)
        self.fact_proof: Dict[Atom, Callable[[], Derivation]] = {}
        for a, th in self.facts:
            self.fact_proof.setdefault(a, th)
        self.cc = CongruenceClosure()
        self.by_sym: Dict[str, List[Rel]] = {}
        self.eqs: List[Eq] = []
        for a, _ in self.facts:
            for t in atom_terms(a):
                self.cc.add_term(t)
            if isinstance(a, Rel):
                self.by_sym.setdefault(a.sym, []).append(a)
            else:
                self.eqs.append(a)
        for a in self.eqs:
            self.cc.merge(a.lhs, a.rhs)
        self._memo: Dict[Tuple[Term, Term], Derivation] = {}

    # semantic side

    def equal(self, s: Term, t: Term) -> bool:
        return self.cc.equal(s, t)

    def holds(self, a: Atom) -> bool:
        if isinstance(a, Eq):
            return self.equal(a.lhs, a.rhs)
        return self.support(a) is not None

    def support(self, a: Rel) -> Optional[Rel]:
        for f in self.by_sym.get(a.sym, ()):
            if len(f.args) == len(a.args) and all(self.equal(s, t) for s, t in zip(f.args, a.args)):
                return f
        return None

    def representatives(self) -> List[Term]:
        ctxset = set(self.ctx)
        best: Dict[Term, Term] = {}
        for t in self.cc.terms:
            r = self.cc.find(t)
            cur = best.get(r)
            if cur is None or self._rank(t, ctxset) < self._rank(cur, ctxset):
                best[r] = t
        for v in self.ctx:
            # context variables are always available, even without facts
            if Var(v) not in self.cc.uf.parent:
                best[Var(v)] = Var(v)
        return sorted(best.values(), key=lambda t: self._rank(t, ctxset))

    @staticmethod
    def _rank(t: Term, ctxset):
        return (not (isinstance(t, Var) and t.name in ctxset), _term_size(t), repr(t))

    def rep(self, t: Term) -> Term:
        r = self.cc.find(t)
        ctxset = set(self.ctx)
        members = [u for u in self.cc.terms if self.cc.find(u) == r]
        return min(members, key=lambda u: self._rank(u, ctxset))

    def solve(self, matrix: Sequence[Atom], unknowns: Sequence[str], env=None, limit: int = SEARCH_LIMIT
              ) -> Iterator[Dict[str, Term]]:
        """Assignments of ``unknowns`` to terms under which every atom holds."""
        env = dict(env or {})
        unknowns = [u for u in unknowns if u not in env]
        reps = None
        budget = [limit]

        def vars_of(a):
            return {v for t in atom_terms(a) for v in term_vars(t)}

        def go(sigma, todo):
            nonlocal reps
            budget[0] -= 1
            if budget[0] < 0:
                return
            open_atoms = []
            for a in todo:
                if vars_of(a) & set(unknowns) - set(sigma):
                    open_atoms.append(a)
                elif not self.holds(subst(a, sigma)):
                    return
            free = [u for u in unknowns if u not in sigma]
            if not free:
                yield dict(sigma)
                return
            for a in open_atoms:
                if isinstance(a, Rel):
                    for f in self.by_sym.get(a.sym, ()):
                        s2 = dict(sigma)
                        ok = True
                        for t, ft in zip(a.args, f.args):
                            if isinstance(t, Var) and t.name in free:
                                if t.name in s2 and not self.equal(s2[t.name], ft):
                                    ok = False
                                    break
                                s2.setdefault(t.name, self.rep(ft))
                        if ok and len(s2) > len(sigma):
                            yield from go(s2, open_atoms)
                    return
                if isinstance(a, Eq):
                    for x, other in ((a.lhs, a.rhs), (a.rhs, a.lhs)):
                        if isinstance(x, Var) and x.name in free and not (set(term_vars(other)) & set(free)):
                            s2 = dict(sigma)
                            s2[x.name] = self.rep(subst_term(other, sigma))
                            yield from go(s2, open_atoms)
                            return
            if reps is None:
                reps = self.representatives()
            u = free[0]
            for r in reps:
                s2 = dict(sigma)
                s2[u] = r
                yield from go(s2, open_atoms)

        yield from go(env, list(matrix))

    # proof side

    def _top(self) -> Derivation:
        return top_intro(self.ctx, self.base)

    def refl(self, t: Term) -> Derivation:
        return seq(self._top(), eq_refl(self.ctx, t))

    def rewrite(self, p_eq: Derivation, p_theta: Derivation, theta_x: Formula, x: str) -> Derivation:
        """From ``s = t`` and ``theta[s/x]`` derive ``theta[t/x]``."""
        s, t = p_eq.cons.lhs, p_eq.cons.rhs
        y = self.names.fresh("y")
        big = self.ctx + (x, y)
        es = eq_subst(big, [(x, y)], theta_x)
        m = {v: Var(v) for v in self.ctx}
        m[x], m[y] = s, t
        inst = substitution(es, m, self.ctx)
        return cut(and_intro([p_eq, p_theta]), inst)

    def symm(self, p: Derivation) -> Derivation:
        s = p.cons.lhs
        x = self.names.fresh("x")
        return self.rewrite(p, self.refl(s), Eq(Var(x), s), x)

    def trans(self, p1: Derivation, p2: Derivation) -> Derivation:
        s = p1.cons.lhs
        x = self.names.fresh("x")
        return self.rewrite(p2, p1, Eq(s, Var(x)), x)

    def congruence(self, s: App, t: App) -> Derivation:
        p = self.refl(s)
        cur = list(s.args)
        for i, (a, b) in enumerate(zip(s.args, t.args)):
            if a == b:
                continue
            x = self.names.fresh("x")
            hole = App(s.sym, tuple(cur[:i]) + (Var(x),) + tuple(cur[i + 1 :]))
            p = self.rewrite(self.explain(a, b), p, Eq(s, hole), x)
            cur[i] = b
        return p

    def explain(self, s: Term, t: Term) -> Derivation:
        """``base |- s = t`` for congruent ``s`` and ``t``."""
        if s == t:
            return self.refl(s)
        key = (s, t)
        if key in self._memo:
            return self._memo[key]
        if not self.equal(s, t):
            raise ProofSearchFailed(f"{s!r} and {t!r} are not provably equal")
        root = self.cc.find(s)
        cls = [u for u in self.cc.terms if self.cc.find(u) == root]
        edges: Dict[Term, List[Tuple[Term, str, object]]] = {u: [] for u in cls}
        for e in self.eqs:
            if e.lhs in edges and e.rhs in edges and e.lhs != e.rhs:
                edges[e.lhs].append((e.rhs, "fact", e))
                edges[e.rhs].append((e.lhs, "factsym", e))
        apps = [u for u in cls if isinstance(u, App) and u.args]
        for u in apps:
            for v in apps:
                if u is not v and u != v and u.sym == v.sym and len(u.args) == len(v.args):
                    if all(self.equal(a, b) for a, b in zip(u.args, v.args)):
                        edges[u].append((v, "cong", None))
        prev: Dict[Term, Tuple[Term, str, object]] = {s: None}
        q = deque([s])
        while q and t not in prev:
            u = q.popleft()
            for v, kind, lab in edges.get(u, ()):
                if v not in prev:
                    prev[v] = (u, kind, lab)
                    q.append(v)
        if t not in prev:
            raise ProofSearchFailed("no explanation path")
        path = []
        cur = t
        while prev[cur] is not None:
            u, kind, lab = prev[cur]
            path.append((u, cur, kind, lab))
            cur = u
        path.reverse()
        proof = None
        for u, v, kind, lab in path:
            if kind == "fact":
                step = self.fact_proof[lab]()
            elif kind == "factsym":
                step = self.symm(self.fact_proof[lab]())
            else:
                step = self.congruence(u, v)
            proof = step if proof is None else self.trans(proof, step)
        self._memo[key] = proof
        return proof

    def prove_atom(self, a: Atom) -> Derivation:
        if a in self.fact_proof:
            return self.fact_proof[a]()
        if isinstance(a, Eq):
            return self.explain(a.lhs, a.rhs)
        f = self.support(a)
        if f is None:
            raise ProofSearchFailed(f"cannot derive {a!r}")
        p = self.fact_proof[f]()
        cur = list(f.args)
        for i, (s, t) in enumerate(zip(f.args, a.args)):
            if s == t:
                continue
            x = self.names.fresh("x")
            theta = Rel(a.sym, tuple(cur[:i]) + (Var(x),) + tuple(cur[i + 1 :]))
            p = self.rewrite(self.explain(s, t), p, theta, x)
            cur[i] = t
        return p

    def find_witness(self, phi: Formula, hint=None) -> Optional[Tuple[Formula, Dict[str, Term]]]:
        """Rename ``phi`` apart and find terms for its bound variables."""
        phi = rename_bound(phi, self.names)
        bound: List[str] = []
        matrix: List[Atom] = []

        def walk(f):
            if is_atom(f):
                matrix.append(f)
            elif isinstance(f, Conj):
                for p in f.parts:
                    walk(p)
            elif isinstance(f, Exists):
                bound.extend(f.vars)
                walk(f.body)
            else:
                raise NotRegular("goal must be regular")

        walk(phi)
        for sol in self.solve(matrix, bound):
            return phi, sol
        return None

    def prove_target(self, phi: Formula) -> Derivation:
        """``base |-[ctx] phi`` for a regular ``phi`` over ``ctx``."""
        found = self.find_witness(phi)
        if found is None:
            raise ProofSearchFailed("goal does not follow from the hypotheses")
        renamed, sigma = found
        return self._build(renamed, sigma, {})

    def _build(self, phi: Formula, sigma, outer) -> Derivation:
        if is_atom(phi):
            return self.prove_atom(subst(phi, outer))
        if phi == TOP:
            return self._top()
        if isinstance(phi, Conj):
            return and_intro([self._build(p, sigma, outer) for p in phi.parts])
        inner_env = dict(outer)
        for v in phi.vars:
            inner_env[v] = sigma[v]
        inner = self._build(phi.body, sigma, inner_env)
        inst = subst(phi.body, outer)
        intro = exists_intro(self.ctx, inst, phi.vars)
        m = {v: Var(v) for v in self.ctx}
        m.update({v: sigma[v] for v in phi.vars})
        return cut(inner, substitution(intro, m, self.ctx))


def hypotheses_prover(H: Sequence[Atom], ctx, names: Names) -> HornProver:
    base = conj(*H)
    facts = []
    for a in dict.fromkeys(H):
        facts.append((a, (lambda a=a: project(ctx, base, a))))
    return HornProver(base, ctx, facts, names)


# -- the search ----------------------------------------------------------------------


@dataclass
class _Firing:
    axiom: str
    sigma: Dict[str, Term]
    cons: Formula  # instantiated consequent, bound variables renamed apart
    new_vars: List[str]
    atoms: List[Atom]


def _axiom_matrix(ax: Sequent, names: Names):
    ante = rename_bound(ax.ante, names)
    bound, matrix = [], []

    def walk(f):
        if is_atom(f):
            matrix.append(f)
        elif isinstance(f, Conj):
            for p in f.parts:
                walk(p)
        elif isinstance(f, Exists):
            bound.extend(f.vars)
            walk(f.body)
        else:
            raise NotRegular("axiom antecedent must be regular")

    walk(ante)
    return bound, matrix


def _instances(hp: HornProver, ax: Sequent, names: Names) -> List[Dict[str, Term]]:
    bound, matrix = _axiom_matrix(ax, names)
    # rename the axiom context apart from the working context
    ren = {v: Var(names.fresh(v)) for v in ax.ctx}
    matrix = [subst(a, ren) for a in matrix]
    seen = {}
    for sol in hp.solve(matrix, [r.name for r in ren.values()] + bound):
        sigma = {v: hp.rep(sol[ren[v].name]) for v in ax.ctx}
        key = tuple(sigma[v] for v in ax.ctx)
        seen.setdefault(key, sigma)
    return [seen[k] for k in sorted(seen, key=repr)]


def _holds(hp: HornProver, phi: Formula) -> bool:
    return hp.find_witness(phi) is not None


def _search(T: Theory, ctx, H, goal, names: Names, fuel: int):
    firings: List[_Firing] = []
    fired = set()
    H = list(H)
    ctx = list(ctx)
    for rnd in range(fuel + 1):
        hp = hypotheses_prover(H, ctx, Names(names.used))
        if _holds(hp, goal):
            return firings
        if rnd == fuel:
            break
        new = []
        for name in sorted(T.axioms):
            ax = T.axioms[name]
            for sigma in _instances(hp, ax, Names(names.used)):
                key = (name, tuple(sigma[v] for v in ax.ctx))
                if key in fired:
                    continue
                cons = subst(ax.cons, sigma)
                if _holds(hp, cons):
                    continue
                fired.add(key)
                new.append((name, sigma, cons))
        if not new:
            break
        for name, sigma, cons in new:
            c = rename_bound(cons, names)
            vs, atoms, _ = open_hypothesis(c, tuple(ctx), Names(names.used))
            names.avoid(vs)
            firings.append(_Firing(name, sigma, c, vs, atoms))
            ctx.extend(vs)
            H.extend(a for a in atoms if a not in H)
        if len(H) > FACT_LIMIT:
            break
    return None


def _replay_ok(T: Theory, ctx, H, goal, firings: Sequence[_Firing], names: Names) -> bool:
    H = list(H)
    ctx = list(ctx)
    for f in firings:
        if any(v not in ctx for t in f.sigma.values() for v in term_vars(t)):
            return False
        hp = hypotheses_prover(H, ctx, Names(names.used))
        if not _holds(hp, subst(T.axioms[f.axiom].ante, f.sigma)):
            return False
        ctx.extend(f.new_vars)
        H.extend(a for a in f.atoms if a not in H)
    return _holds(hypotheses_prover(H, ctx, Names(names.used)), goal)


def _prune(T, ctx, H, goal, firings, names, max_prune=80):
    kept = list(firings)
    if len(kept) > max_prune:
        return kept
    for i in range(len(kept) - 1, -1, -1):
        trial = kept[:i] + kept[i + 1 :]
        if _replay_ok(T, ctx, H, goal, trial, names):
            kept = trial
    return kept


def _build(T: Theory, ctx, H, goal, firings: Sequence[_Firing], k: int, names: Names) -> Derivation:
    ctx = tuple(ctx)
    hp = hypotheses_prover(H, ctx, names)
    if k == len(firings):
        return hp.prove_target(goal)
    f = firings[k]
    ax = T.axioms[f.axiom]
    q = hp.prove_target(subst(ax.ante, f.sigma))
    leaf = axiom(T, f.axiom)
    inst = substitution(leaf, f.sigma, ctx)
    r = cut(q, inst)
    base = conj(*H)
    both_cons = Conj((base, f.cons))
    both = Derivation("AndIntro", Sequent(ctx, base, both_cons), (identity(ctx, base), r))
    vs, atoms, w = open_hypothesis(both_cons, ctx, names)
    if set(vs) != set(f.new_vars):
        raise RuntimeError("replay opened different variables than the search")
    H2 = list(dict.fromkeys(atoms))
    rest = _build(T, ctx + tuple(vs), H2, goal, firings, k + 1, names)
    return seq(both, w(rest))


def prove_sequent(T: Theory, sigma: Sequent, fuel: int = 8, prune: bool = True) -> Derivation:
    """A derivation of the regular sequent ``sigma`` from ``T``, or ``ProofSearchFailed``."""
    if isinstance(sigma.cons, Disj):
        raise NotRegular("prove a single disjunct and use OrIntro")
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    try:
        names = Names(set(sigma.ctx) | all_var_names(sigma.ante) | all_var_names(sigma.cons))
        for ax in T.axioms.values():
            names.avoid(ax.ctx)
        ctx = tuple(sigma.ctx)
        vs, H, wrap = open_hypothesis(sigma.ante, ctx, names)
        work_ctx = ctx + tuple(vs)
        firings = _search(T, work_ctx, H, sigma.cons, names, fuel)
        if firings is None:
            raise ProofSearchFailed(f"no derivation found within fuel {fuel}")
        if prune and firings:
            firings = _prune(T, work_ctx, H, sigma.cons, firings, names)
        body = _build(T, work_ctx, list(dict.fromkeys(H)), sigma.cons, firings, 0, names)
        return wrap(body)
    finally:
        sys.setrecursionlimit(limit)


def derive_from_facts(facts: Sequence[Tuple[Atom, Callable[[], Derivation]]], phi: Formula, ctx=()) -> Derivation:
    """``true |-[ctx] phi`` from facts each given with a derivation ``true |- fact``."""
    names = Names(set(ctx) | all_var_names(phi))
    hp = HornProver(TOP, ctx, facts, names)
    return hp.prove_target(phi)
