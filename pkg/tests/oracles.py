"""Independent reference implementations used to cross-check the engine.

Nothing here imports the chase, the prover or the formula evaluator; only the
plain data types are shared.
"""

from __future__ import annotations

import itertools
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from chasekit.semantics import Structure
from chasekit.syntax import App, Conj, Disj, Eq, Exists, Rel, Sequent, Theory, Var


# -- brute-force evaluation -----------------------------------------------------------


def term_value(A: Structure, t, env):
    if isinstance(t, Var):
        return env[t.name]
    return A.funs[t.sym][tuple(term_value(A, a, env) for a in t.args)]


def holds(A: Structure, phi, env: Mapping[str, Any]) -> bool:
    """Tarski semantics by exhaustive search over the carrier."""
    if isinstance(phi, Eq):
        return term_value(A, phi.lhs, env) == term_value(A, phi.rhs, env)
    if isinstance(phi, Rel):
        return tuple(term_value(A, a, env) for a in phi.args) in A.rels[phi.sym]
    if isinstance(phi, Conj):
        return all(holds(A, p, env) for p in phi.parts)
    if isinstance(phi, Disj):
        return any(holds(A, p, env) for p in phi.parts)
    if isinstance(phi, Exists):
        for vals in itertools.product(A.carrier, repeat=len(phi.vars)):
            inner = dict(env)
            inner.update(zip(phi.vars, vals))
            if holds(A, phi.body, inner):
                return True
        return False
    raise TypeError(phi)


def sequent_holds(A: Structure, s: Sequent) -> bool:
    for vals in itertools.product(A.carrier, repeat=len(s.ctx)):
        env = dict(zip(s.ctx, vals))
        if holds(A, s.ante, env) and not holds(A, s.cons, env):
            return False
    return True


def is_model(A: Structure, T: Theory) -> bool:
    return all(sequent_holds(A, s) for s in T.axioms.values())


# -- naive fixpoint chase ------------------------------------------------------------------


def _parts(phi):
    if isinstance(phi, Conj):
        return list(phi.parts)
    return [phi]


def _split(s: Sequent):
    """(antecedent atoms, bound vars, consequent atoms) of a normal relational sequent."""
    ante = _parts(s.ante)
    cons = s.cons
    bound: Tuple[str, ...] = ()
    while isinstance(cons, Exists):
        bound += cons.vars
        cons = cons.body
    return ante, bound, _parts(cons)


def _join(rels, atoms, env_list):
    """Nested-loop join of ``atoms`` against the relation tables."""
    for a in atoms:
        nxt = []
        for env in env_list:
            for t in rels[a.sym]:
                e = dict(env)
                ok = True
                for term, val in zip(a.args, t):
                    if e.setdefault(term.name, val) != val:
                        ok = False
                        break
                if ok:
                    nxt.append(e)
        env_list = nxt
    return env_list


def naive_chase(T: Theory, A: Structure, fuel: int):
    """Oblivious chase by simultaneous firing of every new trigger.

    Returns ``(status, structure, levels)`` with status ``saturated`` or
    ``fuel-exhausted``.  Fresh elements are tuples ``("null", k)``.
    """
    carrier = list(A.carrier)
    rels = {s: set(A.rels.get(s, ())) for s in T.signature.rels}
    split = {n: _split(s) for n, s in sorted(T.axioms.items())}
    fired = set()
    counter = itertools.count()
    level = 0
    while True:
        todo = []
        for name, (ante, bound, cons) in split.items():
            ctx = T.axioms[name].ctx
            envs = _join(rels, ante, [{}])
            # context variables absent from the antecedent range over the carrier
            keys = set()
            for env in envs:
                free = [v for v in ctx if v not in env]
                for vals in itertools.product(carrier, repeat=len(free)):
                    e = dict(env)
                    e.update(zip(free, vals))
                    keys.add(tuple(e[v] for v in ctx))
            for key in keys:
                if (name, key) not in fired:
                    todo.append((name, key))
        before = (len(carrier), sum(len(t) for t in rels.values()))
        new_rels = {s: set(t) for s, t in rels.items()}
        new_carrier = list(carrier)
        for name, key in sorted(todo, key=repr):
            ante, bound, cons = split[name]
            env = dict(zip(T.axioms[name].ctx, key))
            for y in bound:
                env[y] = ("null", next(counter))
                new_carrier.append(env[y])
            for a in cons:
                new_rels[a.sym].add(tuple(env[t.name] for t in a.args))
        after = (len(new_carrier), sum(len(t) for t in new_rels.values()))
        if after == before:
            return "saturated", _freeze(T, new_carrier, new_rels), level
        if level == fuel:
            return "fuel-exhausted", _freeze(T, carrier, rels), level
        fired.update(todo)
        carrier, rels = new_carrier, new_rels
        level += 1


def _freeze(T, carrier, rels):
    return Structure(T.signature, tuple(carrier), {s: frozenset(t) for s, t in rels.items()})


# -- isomorphism by brute force -------------------------------------------------------------


def isomorphic(A: Structure, B: Structure) -> bool:
    """Permutation search with a degree-profile prefilter (small carriers only)."""
    if len(A.carrier) != len(B.carrier):
        return False
    if any(len(A.rels[s]) != len(B.rels.get(s, ())) for s in A.rels):
        return False

    def profile(S, e):
        return tuple(sorted((s, i) for s, tab in S.rels.items() for t in tab for i, x in enumerate(t) if x == e))

    pa = {e: profile(A, e) for e in A.carrier}
    pb = {e: profile(B, e) for e in B.carrier}
    order = sorted(A.carrier, key=lambda e: repr(pa[e]))
    used = set()
    m: Dict[Any, Any] = {}

    def consistent():
        for s, tab in A.rels.items():
            for t in tab:
                if all(x in m for x in t) and tuple(m[x] for x in t) not in B.rels[s]:
                    return False
        return True

    def go(i):
        if i == len(order):
            return all(tuple(m[x] for x in t) in B.rels[s] for s, tab in A.rels.items() for t in tab)
        a = order[i]
        for b in B.carrier:
            if b in used or pb[b] != pa[a]:
                continue
            m[a] = b
            used.add(b)
            if consistent() and go(i + 1):
                return True
            used.discard(b)
            del m[a]
        return False

    return go(0)


# -- small semantic search -----------------------------------------------------------------------


def structures(sig, size: int) -> Iterable[Structure]:
    """Every structure on ``size`` elements (keep signatures tiny)."""
    carrier = tuple(f"e{i}" for i in range(size))
    syms = sorted(sig.rels)
    spaces = [list(itertools.product(carrier, repeat=sig.rels[s])) for s in syms]
    fsyms = sorted(sig.funs)
    fspaces = [list(itertools.product(carrier, repeat=sig.funs[f])) for f in fsyms]
    tables = [list(itertools.product(carrier, repeat=len(sp))) for sp in fspaces]
    for choice in itertools.product(*[range(2 ** len(sp)) for sp in spaces]):
        rels = {s: {sp[j] for j in range(len(sp)) if mask >> j & 1} for s, sp, mask in zip(syms, spaces, choice)}
        for values in itertools.product(*tables):
            funs = {f: dict(zip(sp, vals)) for f, sp, vals in zip(fsyms, fspaces, values)}
            yield Structure(sig, carrier, rels, funs)


def all_structures(sig, max_size: int = 3) -> Iterable[Structure]:
    for n in range(1, max_size + 1):
        yield from structures(sig, n)


def equivalent_on_small(sig, phi, psi, ctx, max_size: int = 3) -> bool:
    """``phi`` and ``psi`` agree at every tuple of every structure with at most ``max_size`` elements."""
    for A in all_structures(sig, max_size):
        for vals in itertools.product(A.carrier, repeat=len(ctx)):
            env = dict(zip(ctx, vals))
            if holds(A, phi, env) != holds(A, psi, env):
                return False
    return True


def small_countermodel(T: Theory, sigma: Sequent, max_size: int = 3, budget: int = 200_000) -> Optional[Structure]:
    """A model of T with at most ``max_size`` elements refuting ``sigma``, if one exists."""
    seen = 0
    for n in range(1, max_size + 1):
        for A in structures(T.signature, n):
            seen += 1
            if seen > budget:
                return None
            if is_model(A, T) and not sequent_holds(A, sigma):
                return A
    return None


# -- Horn forward chaining --------------------------------------------------------------------


def horn_closure(T: Theory, facts: Iterable[Tuple[str, tuple]]):
    """Least Herbrand-style fixpoint of a Horn, relational, existential-free theory."""
    known = set(facts)
    elems = {x for _, t in known for x in t}
    changed = True
    while changed:
        changed = False
        rels: Dict[str, set] = {}
        for s, t in known:
            rels.setdefault(s, set()).add(t)
        for s in T.signature.rels:
            rels.setdefault(s, set())
        for name, ax in sorted(T.axioms.items()):
            ante, bound, cons = _split(ax)
            assert not bound
            for env in _join(rels, ante, [{}]):
                free = [v for v in ax.ctx if v not in env]
                for vals in itertools.product(sorted(elems), repeat=len(free)):
                    e = dict(env)
                    e.update(zip(free, vals))
                    for a in cons:
                        f = (a.sym, tuple(e[t.name] for t in a.args))
                        if f not in known:
                            known.add(f)
                            changed = True
    return known
