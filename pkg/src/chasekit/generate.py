"""Random fixtures for tests and acceptance runs.

Every generator takes a ``random.Random``.  ``rng()`` builds one seeded from
``CHASEKIT_SEED`` (default 0) so that whole runs can be replayed.
"""

from __future__ import annotations

import itertools
import os
import random
from typing import List, Optional, Sequence, Tuple

from .semantics import Structure
from .syntax import (
    App,
    Conj,
    Eq,
    Formula,
    Rel,
    Sequent,
    Signature,
    Theory,
    Var,
    conj,
    disj,
    exists,
    free_var_list,
)

ELEMENTS = ("a", "b", "c", "d", "e", "f")
SEED_VAR = "CHASEKIT_SEED"


def seed() -> int:
    return int(os.environ.get(SEED_VAR, "0"))


def rng(offset: int = 0) -> random.Random:
    return random.Random(seed() * 1_000_003 + offset)


def signature(r: random.Random, max_symbols=4, max_arity=3, min_symbols=1) -> Signature:
    n = r.randint(min_symbols, max_symbols)
    names = ["P", "Q", "R", "S", "U", "V"][:n]
    return Signature({}, {s: r.randint(1, max_arity) for s in names})


def _atom(r, sig: Signature, vars_: Sequence[str]) -> Rel:
    sym = r.choice(sorted(sig.rels))
    return Rel(sym, tuple(Var(r.choice(vars_)) for _ in range(sig.rels[sym])))


def normal_sequent(r, sig: Signature, max_ante=2, max_cons=2, p_exists=0.35) -> Sequent:
    """A relational, equality-free sequent in normal form."""
    ctx_size = r.randint(1, 3)
    ctx = tuple(f"x{i}" for i in range(ctx_size))
    ante = [_atom(r, sig, ctx) for _ in range(r.randint(0, max_ante))]
    bound: Tuple[str, ...] = ()
    if r.random() < p_exists:
        bound = tuple(f"y{i}" for i in range(r.randint(1, 2)))
    pool = ctx + bound
    cons = [_atom(r, sig, pool) for _ in range(r.randint(1, max_cons))]
    # every bound variable must occur
    for i, y in enumerate(bound):
        a = cons[i % len(cons)]
        args = list(a.args)
        args[r.randrange(len(args))] = Var(y)
        cons[i % len(cons)] = Rel(a.sym, tuple(args))
    used = set()
    for a in ante + cons:
        used |= {t.name for t in a.args}
    ctx = tuple(v for v in ctx if v in used) or ctx[:1]
    body = conj(*_dedupe(ante + cons))
    if bound:
        bound = tuple(y for y in bound if y in used)
        body = exists(bound, body) if bound else body
    return Sequent(ctx, conj(*ante), body)


def _dedupe(items):
    return list(dict.fromkeys(items))


def theory(r, sig: Optional[Signature] = None, max_axioms=4, **kw) -> Theory:
    sig = sig or signature(r)
    n = r.randint(1, max_axioms)
    return Theory(sig, {f"ax{i}": normal_sequent(r, sig, **kw) for i in range(n)})


def structure(r, sig: Signature, max_size=4, density=0.3, min_size=1) -> Structure:
    n = r.randint(min_size, max_size)
    carrier = ELEMENTS[:n]
    rels = {}
    for s, ar in sig.rels.items():
        rels[s] = {t for t in itertools.product(carrier, repeat=ar) if r.random() < density / max(1, ar - 1)}
    funs = {}
    for f, ar in sig.funs.items():
        funs[f] = {t: r.choice(carrier) for t in itertools.product(carrier, repeat=ar)}
    return Structure(sig, carrier, rels, funs)


def function_signature(r, max_rels=2, max_funs=2, max_arity=2) -> Signature:
    rels = {s: r.randint(1, max_arity) for s in ["P", "R"][: r.randint(1, max_rels)]}
    funs = {f: r.randint(0, 1) for f in ["f", "g"][: r.randint(1, max_funs)]}
    return Signature(funs, rels)


def term(r, sig: Signature, vars_: Sequence[str], depth=1):
    funs = sorted(sig.funs)
    if depth > 0 and funs and r.random() < 0.5:
        f = r.choice(funs)
        return App(f, tuple(term(r, sig, vars_, depth - 1) for _ in range(sig.funs[f])))
    if vars_:
        return Var(r.choice(vars_))
    consts = [f for f in funs if sig.funs[f] == 0]
    return App(r.choice(consts), ()) if consts else Var("x0")


def regular_formula(r, sig: Signature, free: Sequence[str], max_depth=2, max_atoms=3, equality=False, terms=False) -> Formula:
    """Regular formula over ``free`` (all of which need not occur)."""
    depth = r.randint(0 if free else 1, max(max_depth, 1))
    bound = tuple(f"z{i}" for i in range(depth))
    pool = tuple(free) + bound
    parts: List[Formula] = []
    for _ in range(r.randint(1, max_atoms)):
        if equality and r.random() < 0.25:
            parts.append(Eq(term(r, sig, pool, 1 if terms else 0), term(r, sig, pool, 1 if terms else 0)))
            continue
        sym = r.choice(sorted(sig.rels))
        args = tuple(term(r, sig, pool, 1 if terms else 0) for _ in range(sig.rels[sym]))
        parts.append(Rel(sym, args))
    body = conj(*parts)
    occurring = set(free_var_list(body))
    bound = tuple(z for z in bound if z in occurring)
    return exists(bound, body) if bound else body


def with_noise(r, sig: Signature, phi: Formula, free: Sequence[str]) -> Tuple[Formula, int]:
    """Disjoin ``phi`` with a random formula; returns the disjunction and the 1-based index of ``phi``."""
    noise = regular_formula(r, sig, free)
    if r.random() < 0.5:
        return disj(phi, noise), 1
    return disj(noise, phi), 2


def atoms_of(A: Structure):
    return [(s, t) for s in sorted(A.rels) for t in A.sorted_rels[s]]


def conj_of_tuples(facts, names) -> Formula:
    return conj(*(Rel(s, tuple(Var(names[x]) for x in t)) for s, t in facts)) if facts else Conj(())


def tame_instance(r, probe_fuel=6, max_elements=60, horizon=20, tries=500, **kw):
    """A (theory, structure) pair whose chase stays small.

    Random normal theories often grow doubly exponentially.  An instance is
    kept when its chase saturates within ``probe_fuel`` levels, or when its
    growth per level is not accelerating and a linear extrapolation to
    ``horizon`` levels stays under ``max_elements``.
    """
    from .chase import chase

    for _ in range(tries):
        T = theory(r, **kw)
        A = structure(r, T.signature)
        sizes = []
        for fuel in range(probe_fuel + 1):
            tr = chase(T, A, fuel)
            sizes.append(tr.final.size)
            if tr.final.size > max_elements or tr.saturated:
                break
        if tr.saturated and tr.final.size <= max_elements:
            return T, A
        if len(sizes) < probe_fuel + 1:
            continue
        steps = [b - a for a, b in zip(sizes, sizes[1:])]
        if all(x >= y for x, y in zip(steps[1:], steps[2:])) and sizes[-1] + steps[-1] * (horizon - probe_fuel) <= max_elements:
            return T, A
    raise RuntimeError("no tame instance found")
