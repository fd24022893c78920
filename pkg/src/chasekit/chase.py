"""The chase: one-step extensions, saturation, witnesses and entailment.

Three firing disciplines are offered:

``lean`` (default)
    every axiom instance ``(tau, args)`` fires once, at the first level where
    its antecedent holds.
``faithful``
    every instance fires at every level, as in the textbook one-step
    extension; only saturates for theories without existentials.
``restricted``
    like ``lean`` but an instance whose consequent already holds is skipped.
    Needed for theories with function symbols, whose totality axioms never
    saturate under the other two disciplines.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    NotRegular,
    NotSatisfiedAtAnyLevel,
    PreconditionViolation,
    TraceExhausted,
)
from .normalize import (
    NormalSequent,
    back_translate,
    eliminate_equality,
    eliminate_functions,
    equality_symbol,
    flatten,
    graph_symbols,
    graphs_to_structure,
    normal_axioms,
    normalize_theory,
    structure_of_graphs,
    to_equality_predicate,
    unflatten,
)
from .semantics import (
    Homomorphism,
    Structure,
    e_expand,
    element_key,
    evaluate,
    evaluate_query,
    q_quotient,
    quotient_map,
    representing_structure,
    satisfy,
    solutions,
    tuple_key,
)
from .syntax import (
    TOP,
    Atom,
    Disj,
    Eq,
    Formula,
    Fragment,
    Rel,
    Sequent,
    Signature,
    Theory,
    Var,
    all_var_names,
    atom_terms,
    classify_fragment,
    conj,
    exists,
    free_vars,
    fresh_var,
    has_equality,
    prenex,
    term_vars,
)

MODES = ("lean", "faithful", "restricted")


@dataclass(frozen=True)
class New:
    """A chase element ``(axiom, args, index)`` adjoined at ``level``."""

    level: int
    axiom: str
    args: tuple
    index: int
    # nested elements make both of these recursive, so compute them once
    _key: tuple = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        key = (self.level, self.axiom, tuple_key(self.args), self.index)
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash((self.level, self.axiom, self.args, self.index)))

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return self._key

    def __repr__(self) -> str:
        return f"New({self.level},{self.axiom},{self.args!r},{self.index})"


@dataclass(frozen=True)
class Firing:
    axiom: str
    args: tuple
    witnesses: tuple


@dataclass
class ChaseTrace:
    theory: Theory
    axioms: Dict[str, NormalSequent]
    levels: List[Structure]
    firings: List[List[Firing]]
    status: str
    mode: str = "lean"

    @property
    def saturated(self) -> bool:
        return self.status == "saturated"

    @property
    def saturated_at(self) -> Optional[int]:
        return len(self.levels) - 1 if self.saturated else None

    @property
    def final(self) -> Structure:
        return self.levels[-1]

    def embedding(self, i: int) -> Homomorphism:
        """The inclusion of level ``i`` into level ``i + 1``."""
        src, tgt = self.levels[i], self.levels[i + 1]
        return Homomorphism(src, tgt, {e: e for e in src.carrier})

    def eta(self) -> Homomorphism:
        return Homomorphism(self.levels[0], self.final, {e: e for e in self.levels[0].carrier})

    def least_level(self, phi: Formula, assignment: Mapping[str, Any]) -> Optional[int]:
        for n, level in enumerate(self.levels):
            if evaluate(level, phi, assignment):
                return n
        return None


# -- preconditions ---------------------------------------------------------------


def _merge_signatures(a: Signature, b: Signature) -> Signature:
    for table_a, table_b in ((a.rels, b.rels), (a.funs, b.funs)):
        for k in set(table_a) & set(table_b):
            if table_a[k] != table_b[k]:
                raise PreconditionViolation(f"symbol {k} has arity {table_a[k]} and {table_b[k]}")
    if set(a.rels) & set(b.funs) or set(a.funs) & set(b.rels):
        raise PreconditionViolation("symbol used both as relation and function")
    return a.extend(funs=b.funs, rels=b.rels)


def _align(T: Theory, A: Structure) -> Tuple[Theory, Structure]:
    sig = _merge_signatures(T.signature, A.signature)
    if sig != T.signature:
        T = Theory(sig, dict(T.axioms))
    if sig != A.signature:
        missing_funs = set(sig.funs) - set(A.signature.funs)
        if missing_funs:
            raise PreconditionViolation(f"structure does not interpret {sorted(missing_funs)}")
        A = Structure(sig, A.carrier, dict(A.rels), dict(A.funs))
    return T, A


def chase_axioms(T: Theory) -> Dict[str, NormalSequent]:
    """Normal axioms of ``T`` after checking the chase preconditions."""
    if not T.signature.relational:
        raise PreconditionViolation("the chase needs a relational signature")
    try:
        axioms = normal_axioms(T)
    except Exception as exc:
        raise PreconditionViolation(str(exc)) from None
    for name, ns in axioms.items():
        if any(isinstance(a, Eq) for a in ns.antecedent + ns.matrix):
            raise PreconditionViolation(f"axiom {name} uses equality")
    return axioms


# -- one step -----------------------------------------------------------------------


def _matches(A: Structure, ns: NormalSequent) -> List[tuple]:
    # the solver enumerates in a fixed order and binds exactly the context
    return [tuple(sol[v] for v in ns.ctx) for sol in solutions(A, ns.antecedent, {}, ns.ctx)]


def _instance_holds(A: Structure, ns: NormalSequent, args: tuple) -> bool:
    env = dict(zip(ns.ctx, args))
    return any(True for _ in solutions(A, ns.matrix, env, ns.bound))


def _plan(A, axioms, fired, level, mode, jobs):
    names = sorted(axioms)

    def per_axiom(name):
        ns = axioms[name]
        out = []
        for args in _matches(A, ns):
            if mode != "faithful" and (name, args) in fired:
                continue
            if mode == "restricted" and _instance_holds(A, ns, args):
                continue
            wit = tuple(New(level + 1, name, args, j) for j in range(len(ns.bound)))
            out.append(Firing(name, args, wit))
        return out

    if jobs > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(per_axiom, names))
    else:
        results = [per_axiom(n) for n in names]
    firings = [f for group in results for f in group]
    if mode == "restricted":
        # existential-free instances first, so that new elements are only
        # invented once nothing else can be derived
        full = [f for f in firings if not f.witnesses]
        if full:
            return full
    return firings


def _productive(A: Structure, axioms, fired, mode) -> bool:
    """Whether the next step would add an element or a tuple (stops at the first one)."""
    for name in sorted(axioms):
        ns = axioms[name]
        for sol in solutions(A, ns.antecedent, {}, ns.ctx):
            args = tuple(sol[v] for v in ns.ctx)
            if mode != "faithful" and (name, args) in fired:
                continue
            if ns.bound:
                if mode == "restricted" and _instance_holds(A, ns, args):
                    continue
                return True
            env = dict(zip(ns.ctx, args))
            if any(tuple(env[t.name] for t in a.args) not in A.rels[a.sym] for a in ns.matrix):
                return True
    return False


def _apply(A: Structure, axioms, firings: Sequence[Firing]) -> Structure:
    carrier = list(A.carrier)
    rels = {s: set(t) for s, t in A.rels.items()}
    for f in firings:
        ns = axioms[f.axiom]
        carrier.extend(f.witnesses)
        env = dict(zip(ns.ctx, f.args))
        env.update(zip(ns.bound, f.witnesses))
        for atom in ns.matrix:
            rels[atom.sym].add(tuple(env[t.name] for t in atom.args))
    return Structure(A.signature, tuple(carrier), rels)


def one_step(T: Theory, A: Structure, mode: str = "faithful", fired=None, level: int = 0, jobs: int = 1):
    """One-step extension ``S(A)`` with its inclusion ``A -> S(A)``.

    With the default ``faithful`` mode this is the full simultaneous
    extension over every axiom instance.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    T, A = _align(T, A)
    axioms = chase_axioms(T)
    firings = _plan(A, axioms, fired or set(), level, mode, jobs)
    B = _apply(A, axioms, firings)
    return B, Homomorphism(A, B, {e: e for e in A.carrier})


def chase(T: Theory, A: Structure, fuel: int, mode: str = "lean", jobs: int = 1) -> ChaseTrace:
    """Iterate one-step extensions until nothing changes or ``fuel`` levels are built."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    T, A = _align(T, A)
    axioms = chase_axioms(T)
    levels = [A]
    all_firings: List[List[Firing]] = []
    fired: set = set()
    while True:
        n = len(levels) - 1
        current = levels[-1]
        if n == fuel:
            status = "fuel-exhausted" if _productive(current, axioms, fired, mode) else "saturated"
            return ChaseTrace(T, axioms, levels, all_firings, status, mode)
        firings = _plan(current, axioms, fired, n, mode, jobs)
        nxt = _apply(current, axioms, firings)
        if len(nxt.carrier) == len(current.carrier) and nxt.fact_count() == current.fact_count():
            return ChaseTrace(T, axioms, levels, all_firings, "saturated", mode)
        for f in firings:
            fired.add((f.axiom, f.args))
        levels.append(nxt)
        all_firings.append(firings)


# -- conservativity witnesses ----------------------------------------------------------


@dataclass
class Witness:
    """``psi`` with ``A |= psi(args)`` and a derivation of ``psi |-_T phi``."""

    psi: Formula
    phi: Formula
    ctx: Tuple[str, ...]
    args: tuple
    level: int
    proof: Any = None
    steps: List[Formula] = field(default_factory=list)


class _Names:
    def __init__(self, avoid):
        self.used = set(avoid)

    def fresh(self, base):
        v = fresh_var(base, self.used)
        self.used.add(v)
        return v


def _firing_index(firings: Sequence[Firing]) -> Dict[Tuple[str, tuple], Firing]:
    return {(f.axiom, f.args): f for f in firings}


def _justification(trace: ChaseTrace, k: int, element) -> Firing:
    f = _firing_index(trace.firings[k - 1]).get((element.axiom, element.args))
    if f is None:
        raise RuntimeError(f"no firing recorded for {element!r}")
    return f


def _renamed_axiom(ns: NormalSequent, names: _Names):
    zs = {v: Var(names.fresh(v)) for v in ns.ctx}
    ws = {v: Var(names.fresh(v)) for v in ns.bound}
    ren = {**zs, **ws}
    ante = tuple(_rename_atom(a, ren) for a in ns.antecedent)
    matrix = tuple(_rename_atom(a, ren) for a in ns.matrix)
    return [zs[v].name for v in ns.ctx], [ws[v].name for v in ns.bound], ante, matrix


def _rename_atom(a: Atom, ren) -> Atom:
    from .syntax import subst

    return subst(a, ren)


def step_back(trace: ChaseTrace, k: int, phi: Formula, ctx: Sequence[str], args: tuple) -> Formula:
    """Given level ``k`` satisfying ``phi(args)`` (args from level ``k - 1``), a
    formula true of ``args`` at level ``k - 1`` that ``T``-entails ``phi``."""
    A, B = trace.levels[k - 1], trace.levels[k]
    old_elems = set(A.carrier)
    env0 = dict(zip(ctx, args))
    names = _Names(set(ctx) | all_var_names(phi))
    bound, matrix = prenex(phi, pad=True, avoid=names.used)
    names.used.update(bound)
    sol = next(iter(solutions(B, matrix, env0, bound)), None)
    if sol is None:
        raise ValueError("formula does not hold at this level")
    old = [y for y in bound if sol[y] in old_elems]
    new = [y for y in bound if sol[y] not in old_elems]

    # classes of new variables linked by shared atoms
    from .closure import UnionFind

    uf = UnionFind(new)
    atom_vars = []
    for a in matrix:
        vs = [v for t in atom_terms(a) for v in term_vars(t)]
        nv = [v for v in vs if v in new]
        for v in nv[1:]:
            uf.union(nv[0], v)
        atom_vars.append((a, nv))
    classes: Dict[str, List[str]] = {}
    for y in new:
        classes.setdefault(uf.find(y), []).append(y)

    pieces: List[Formula] = []
    # class 0: atoms over old elements only
    for a, nv in atom_vars:
        if nv:
            continue
        if evaluate(A, a, sol):
            pieces.append(a)
            continue
        pieces.append(_explain_old_fact(trace, k, a, sol, names))
    # the other classes, one per shared justification
    for root, members in classes.items():
        elems = [sol[y] for y in members]
        just = {(e.axiom, e.args) for e in elems}
        if len(just) != 1:
            raise RuntimeError("linked chase elements with different justifications")
        firing = _justification(trace, k, elems[0])
        ns = trace.axioms[firing.axiom]
        zs, ws, chi, zeta = _renamed_axiom(ns, names)
        val_z = dict(zip(zs, firing.args))
        val_w = dict(zip(ws, firing.witnesses))
        val = {**val_z, **val_w}
        rho: List[Atom] = []
        for a, nv in atom_vars:
            if not nv or uf.find(nv[0]) != root or not isinstance(a, Rel):
                continue
            target = tuple(sol[t.name] for t in a.args)
            match = next(
                (c for c in zeta if c.sym == a.sym and tuple(val[t.name] for t in c.args) == target),
                None,
            )
            if match is None:
                raise RuntimeError(f"fact {a!r} not produced by its justification")
            for t, s in zip(a.args, match.args):
                if t.name not in new:
                    eq = Eq(t, s)
                    if eq not in rho:
                        rho.append(eq)
        body = conj(*rho, *chi)
        if body != TOP:
            pieces.append(exists(zs, body) if zs else body)
    psi = exists(old, conj(*pieces))
    return psi


def _explain_old_fact(trace, k, a: Atom, sol, names: _Names) -> Formula:
    if not isinstance(a, Rel):
        raise RuntimeError("equality between old elements cannot be new")
    target = tuple(sol[t.name] for t in a.args)
    for firing in trace.firings[k - 1]:
        ns = trace.axioms[firing.axiom]
        val = dict(zip(ns.ctx, firing.args))
        for c in ns.matrix:
            if c.sym != a.sym or any(t.name in ns.bound for t in c.args):
                continue
            if tuple(val[t.name] for t in c.args) != target:
                continue
            zs, ws, chi, zeta = _renamed_axiom(ns, names)
            ren = dict(zip(ns.ctx, zs))
            rho = [Eq(t, Var(ren[s.name])) for t, s in zip(a.args, c.args)]
            return exists(zs, conj(*rho, *chi)) if zs else conj(*rho, *chi)
    raise RuntimeError(f"new fact {a!r} has no justification")


def conservativity_witness(trace: ChaseTrace, phi: Formula, ctx: Sequence[str], args: Sequence[Any],
                           prove: bool = True) -> Witness:
    """Descend from the least level satisfying ``phi(args)`` to the base structure."""
    ctx = tuple(ctx)
    args = tuple(args)
    if classify_fragment(phi) > Fragment.REGULAR:
        raise NotRegular("witnesses are only defined for regular formulas")
    stray = free_vars(phi) - set(ctx)
    if stray:
        raise ValueError(f"{sorted(stray)} not in context")
    base = set(trace.levels[0].carrier)
    if any(a not in base for a in args):
        raise ValueError("arguments must come from the base structure")
    env = dict(zip(ctx, args))
    n = trace.least_level(phi, env)
    if n is None:
        if trace.saturated:
            raise NotSatisfiedAtAnyLevel("formula holds at no level of the chase")
        raise TraceExhausted("formula holds at no recorded level; more fuel may help")
    psi = phi
    steps = [phi]
    for k in range(n, 0, -1):
        psi = step_back(trace, k, psi, ctx, args)
        steps.append(psi)
    if not evaluate(trace.levels[0], psi, env):
        raise RuntimeError("witness construction produced a formula false in the base")
    w = Witness(psi, phi, ctx, args, n, None, steps)
    if prove:
        from .prover import prove_sequent

        w.proof = prove_sequent(trace.theory, Sequent(ctx, psi, phi), fuel=max(n, 1))
    return w


# -- arbitrary signatures ---------------------------------------------------------------


@dataclass
class GeneralChase:
    theory: Theory
    structure: Structure
    model: Optional[Structure]
    eta: Optional[Homomorphism]
    trace: ChaseTrace
    status: str
    relational_theory: Theory
    graphs: Dict[str, str]
    equality: Optional[str]

    @property
    def saturated(self) -> bool:
        return self.status == "saturated"

    def translate(self, phi: Formula, avoid=()) -> Formula:
        """Formula over the signature the underlying chase runs on."""
        if self.graphs:
            phi = flatten(phi, self.graphs, avoid)
        if self.equality:
            phi = to_equality_predicate(phi, self.equality)
        return phi

    def back(self, phi: Formula) -> Formula:
        if self.equality:
            phi = back_translate(phi, self.equality)
        if self.graphs:
            phi = unflatten(phi, self.graphs)
        return phi

    def witness(self, phi: Formula, ctx: Sequence[str], args: Sequence[Any], prove: bool = True) -> Witness:
        inner = conservativity_witness(self.trace, self.translate(phi, ctx), ctx, args, prove=False)
        psi = self.back(inner.psi)
        if not evaluate(self.structure, psi, dict(zip(ctx, args))):
            raise RuntimeError("back-translated witness fails in the input structure")
        w = Witness(psi, phi, tuple(ctx), tuple(args), inner.level, None, inner.steps)
        if prove:
            from .prover import prove_sequent

            w.proof = prove_sequent(self.theory, Sequent(tuple(ctx), psi, phi), fuel=max(inner.level, 1) + 1)
        return w


def default_mode(T: Theory) -> str:
    return "lean" if T.signature.relational else "restricted"


def chase_general(T: Theory, A: Structure, fuel: int, mode: Optional[str] = None, jobs: int = 1) -> GeneralChase:
    """Function elimination, normalization, equality elimination, chase, then back again."""
    if classify_fragment(T) > Fragment.REGULAR:
        raise NotRegular("chase_general needs a regular theory")
    T, A = _align(T, A)
    mode = mode or default_mode(T)
    graphs = graph_symbols(T.signature) if not T.signature.relational else {}
    _, T_bar = eliminate_functions(T)
    A_bar = structure_of_graphs(A, graphs) if graphs else A
    T_norm = normalize_theory(T_bar)
    E = None
    if T_norm.has_equality:
        E = equality_symbol(T_norm.signature)
        T_run = normalize_theory(eliminate_equality(T_norm, E))
        A_run = e_expand(A_bar, E)
    else:
        T_run, A_run = T_norm, A_bar
    trace = chase(T_run, A_run, fuel, mode, jobs)
    model = eta = None
    try:
        final = trace.final
        if E:
            M_bar, q = q_quotient(final, E, with_map=True)
        else:
            M_bar, q = final, {e: e for e in final.carrier}
        M = graphs_to_structure(M_bar, T.signature, graphs) if graphs else M_bar
        model = M
        eta = Homomorphism(A, M, {a: q[a] for a in A.carrier})
    except Exception:
        if trace.saturated:
            raise
    return GeneralChase(T, A, model, eta, trace, trace.status, T_run, graphs, E)


# -- entailment -----------------------------------------------------------------------------


@dataclass
class Entailment:
    verdict: str  # "provable" | "refuted" | "unknown"
    sequent: Sequent
    disjunct: Optional[int] = None  # 1-based
    countermodel: Optional[Structure] = None
    assignment: Optional[Dict[str, Any]] = None
    witness: Optional[Witness] = None
    horn_proof: Any = None
    proof: Any = None
    chase: Optional[GeneralChase] = None

    @property
    def provable(self) -> bool:
        return self.verdict == "provable"


def _disjuncts(cons: Formula) -> Tuple[Formula, ...]:
    return cons.parts if isinstance(cons, Disj) else (cons,)


def entails(T: Theory, sigma: Sequent, fuel: int, mode: Optional[str] = None, jobs: int = 1,
            proofs: bool = True) -> Entailment:
    """Chase the representing structure of the antecedent and read off the consequent."""
    if classify_fragment(T) > Fragment.REGULAR:
        raise NotRegular("entails needs a regular theory")
    if classify_fragment(sigma.ante) > Fragment.REGULAR:
        raise NotRegular("antecedent must be regular")
    disjuncts = _disjuncts(sigma.cons)
    if any(classify_fragment(d) > Fragment.REGULAR for d in disjuncts):
        raise NotRegular("consequent must be a disjunction of regular formulas")
    sig = T.signature
    from .syntax import signature_of

    sig = _merge_signatures(sig, signature_of(sigma.ante, *disjuncts))
    T = Theory(sig, dict(T.axioms))
    graphs = graph_symbols(sig) if not sig.relational else {}
    _, T_bar = eliminate_functions(T)
    ante = flatten(sigma.ante, graphs, sigma.ctx) if graphs else sigma.ante
    hoisted, hyps = prenex(ante, pad=False, avoid=set(sigma.ctx) | all_var_names(sigma.cons))
    ctx2 = tuple(sigma.ctx) + hoisted
    rep = representing_structure(conj(*hyps), ctx2, T_bar.signature)
    gc = chase_general(T_bar, rep.structure, fuel, mode or default_mode(T), jobs)
    canon = {v: rep.canonical[v] for v in sigma.ctx}
    cons_bar = [flatten(d, graphs, sigma.ctx) if graphs else d for d in disjuncts]
    result = Entailment("unknown", sigma, chase=gc)
    if gc.saturated:
        M = gc.model
        env = {v: gc.eta(canon[v]) for v in sigma.ctx}
        hit = evaluate_query(M, Disj(tuple(cons_bar)), env)
        if hit is None:
            result.verdict = "refuted"
            result.countermodel = graphs_to_structure(M, sig, graphs) if graphs else M
            result.assignment = env
            return result
        result.verdict = "provable"
        result.disjunct = hit[0] + 1
    else:
        found = None
        for level in gc.trace.levels:
            for i, d in enumerate(cons_bar):
                d_run = to_equality_predicate(d, gc.equality) if gc.equality else d
                if evaluate(level, d_run, canon):
                    found = i
                    break
            if found is not None:
                break
        if found is None:
            return result
        result.verdict = "provable"
        result.disjunct = found + 1
    if proofs:
        _attach_proofs(result, T, sigma, disjuncts, cons_bar, graphs, gc, canon)
    return result


def _attach_proofs(result, T, sigma, disjuncts, cons_bar, graphs, gc, canon):
    from .proofs import Derivation, cut, or_intro
    from .prover import ProofSearchFailed, prove_sequent

    target = disjuncts[result.disjunct - 1]
    ctx = tuple(sigma.ctx)
    fuel = len(gc.trace.levels) + 1
    try:
        inner = gc.translate(cons_bar[result.disjunct - 1], ctx)
        w0 = conservativity_witness(gc.trace, inner, ctx, tuple(canon[v] for v in ctx), prove=False)
        psi = gc.back(w0.psi)
        if graphs:
            psi = unflatten(psi, graphs)
        result.witness = Witness(psi, target, ctx, tuple(canon[v] for v in ctx), w0.level, None, w0.steps)
        result.witness.proof = prove_sequent(T, Sequent(ctx, psi, target), fuel=fuel)
        result.horn_proof = prove_sequent(Theory(T.signature, {}), Sequent(ctx, sigma.ante, psi), fuel=0)
        d = cut(result.horn_proof, result.witness.proof)
    except (ProofSearchFailed, RuntimeError, ValueError):
        try:
            d = prove_sequent(T, Sequent(ctx, sigma.ante, target), fuel=fuel)
        except ProofSearchFailed:
            return
    if isinstance(sigma.cons, Disj):
        d = cut(d, or_intro(ctx, sigma.cons, result.disjunct - 1))
    result.proof = d


@dataclass
class DisjunctionSplit:
    verdict: str
    index: Optional[int]  # 1-based
    entailment: Entailment


def disjunction_split(T: Theory, sigma: Sequent, fuel: int, mode: Optional[str] = None) -> DisjunctionSplit:
    """Pick a single disjunct that ``T`` proves from the antecedent."""
    res = entails(T, sigma, fuel, mode, proofs=False)
    if not res.provable:
        return DisjunctionSplit(res.verdict, None, res)
    i = res.disjunct
    single = Sequent(sigma.ctx, sigma.ante, _disjuncts(sigma.cons)[i - 1])
    check = entails(T, single, fuel, mode, proofs=False)
    if not check.provable:
        raise RuntimeError("chosen disjunct is not provable on its own")
    return DisjunctionSplit("provable", i, res)
