"""Finite structures, Tarski evaluation and homomorphisms.

Evaluation of regular formulas works on the prenex form: the existential
prefix is solved by a backtracking join over the relation tables, so the
cost is governed by table sizes rather than ``|carrier| ** |bound vars|``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Iterator, Mapping, Optional, Sequence, Tuple

from .closure import UnionFind
from .errors import NotAnEStructure, NotHorn, NotRelational
from .syntax import (
    TOP,
    App,
    Atom,
    Conj,
    Disj,
    Eq,
    Formula,
    Rel,
    Sequent,
    Signature,
    Term,
    Theory,
    Var,
    atom_terms,
    free_vars,
    horn_atoms,
    is_atom,
    prenex,
    term_vars,
)


def element_key(e: Any):
    """Total order on carrier elements of mixed kinds (ints, strings, chase elements)."""
    if hasattr(e, "sort_key"):
        return (1, e.sort_key())
    if isinstance(e, bool):
        return (0, 0, int(e), "")
    if isinstance(e, int):
        return (0, 0, e, "")
    if isinstance(e, str):
        return (0, 1, 0, e)
    if isinstance(e, tuple):
        return (0, 2, 0, tuple(element_key(x) for x in e))
    return (0, 3, 0, repr(e))


def sort_elements(elems):
    return sorted(elems, key=element_key)


def tuple_key(t):
    return tuple(element_key(x) for x in t)


@dataclass(frozen=True, eq=False)
class Structure:
    """A finite structure.  ``rels`` maps symbols to sets of tuples and
    ``funs`` maps symbols to total tables ``args -> value``."""

    signature: Signature
    carrier: Tuple[Any, ...]
    rels: Mapping[str, frozenset] = field(default_factory=dict)
    funs: Mapping[str, Mapping[tuple, Any]] = field(default_factory=dict)

    def __post_init__(self):
        carrier = tuple(sort_elements(set(self.carrier)))
        if len(carrier) != len(self.carrier):
            raise ValueError("duplicate carrier elements")
        object.__setattr__(self, "carrier", carrier)
        members = set(carrier)
        rels = {}
        for sym, ar in self.signature.rels.items():
            table = frozenset(tuple(t) for t in self.rels.get(sym, ()))
            for t in table:
                if len(t) != ar:
                    raise ValueError(f"tuple {t} has wrong arity for {sym}/{ar}")
                if not set(t) <= members:
                    raise ValueError(f"tuple {t} of {sym} leaves the carrier")
            rels[sym] = table
        extra = set(self.rels) - set(self.signature.rels)
        if extra:
            raise ValueError(f"tables for undeclared relations {sorted(extra)}")
        funs = {}
        for sym, ar in self.signature.funs.items():
            table = dict(self.funs.get(sym, {}))
            for args in itertools.product(carrier, repeat=ar):
                if args not in table:
                    raise ValueError(f"function {sym} undefined at {args}")
                if table[args] not in members:
                    raise ValueError(f"function {sym} leaves the carrier at {args}")
            if len(table) != len(carrier) ** ar:
                raise ValueError(f"function table for {sym} has entries outside the carrier")
            funs[sym] = table
        extra = set(self.funs) - set(self.signature.funs)
        if extra:
            raise ValueError(f"tables for undeclared functions {sorted(extra)}")
        object.__setattr__(self, "rels", rels)
        object.__setattr__(self, "funs", funs)

    @cached_property
    def sorted_rels(self) -> Dict[str, Tuple[tuple, ...]]:
        rank = {e: i for i, e in enumerate(self.carrier)}
        return {s: tuple(sorted(t, key=lambda tup: tuple(rank[x] for x in tup))) for s, t in self.rels.items()}

    @property
    def size(self) -> int:
        return len(self.carrier)

    def fact_count(self) -> int:
        return sum(len(t) for t in self.rels.values())

    def same_as(self, other: "Structure") -> bool:
        """Equality of carriers and tables (not isomorphism)."""
        return (
            self.signature == other.signature
            and set(self.carrier) == set(other.carrier)
            and self.rels == other.rels
            and self.funs == other.funs
        )

    def rename(self, mapping: Mapping[Any, Any]) -> "Structure":
        """Image of the structure under an injective renaming of elements."""
        m = lambda e: mapping.get(e, e)  # noqa: E731
        return Structure(
            self.signature,
            tuple(m(e) for e in self.carrier),
            {s: {tuple(m(x) for x in t) for t in tab} for s, tab in self.rels.items()},
            {s: {tuple(m(x) for x in a): m(v) for a, v in tab.items()} for s, tab in self.funs.items()},
        )


# -- evaluation ---------------------------------------------------------------


def eval_term(A: Structure, t: Term, env: Mapping[str, Any]):
    if isinstance(t, Var):
        return env[t.name]
    return A.funs[t.sym][tuple(eval_term(A, a, env) for a in t.args)]


def eval_atom(A: Structure, a: Atom, env: Mapping[str, Any]) -> bool:
    if isinstance(a, Eq):
        return eval_term(A, a.lhs, env) == eval_term(A, a.rhs, env)
    return tuple(eval_term(A, t, env) for t in a.args) in A.rels[a.sym]


def _atom_vars(a: Atom):
    out = []
    for t in atom_terms(a):
        for v in term_vars(t):
            if v not in out:
                out.append(v)
    return out


def solutions(A: Structure, matrix: Sequence[Atom], env: Mapping[str, Any], unknowns: Sequence[str]) -> Iterator[Dict[str, Any]]:
    """All extensions of ``env`` to ``unknowns`` satisfying every atom, in a fixed order."""
    atom_vars = [(a, _atom_vars(a)) for a in matrix]
    unknowns = [u for u in unknowns if u not in env]
    yield from _solve(A, atom_vars, dict(env), unknowns)


def _solve(A, atom_vars, env, unknowns):
    open_atoms = []
    for a, vs in atom_vars:
        if all(v in env for v in vs):
            if not eval_atom(A, a, env):
                return
        else:
            open_atoms.append((a, vs))
    pending = [u for u in unknowns if u not in env]
    if not open_atoms:
        if not pending:
            yield dict(env)
            return
        for values in itertools.product(A.carrier, repeat=len(pending)):
            out = dict(env)
            out.update(zip(pending, values))
            yield out
        return
    for a, vs in open_atoms:
        if isinstance(a, Rel) and all(isinstance(t, Var) for t in a.args):
            names = [t.name for t in a.args]
            for tup in A.sorted_rels[a.sym]:
                new = dict(env)
                ok = True
                for n, val in zip(names, tup):
                    if n in new:
                        if new[n] != val:
                            ok = False
                            break
                    else:
                        new[n] = val
                if ok:
                    yield from _solve(A, atom_vars, new, unknowns)
            return
    for a, vs in open_atoms:
        if isinstance(a, Eq):
            for var_side, other in ((a.lhs, a.rhs), (a.rhs, a.lhs)):
                if isinstance(var_side, Var) and var_side.name not in env and all(v in env for v in term_vars(other)):
                    new = dict(env)
                    new[var_side.name] = eval_term(A, other, env)
                    yield from _solve(A, atom_vars, new, unknowns)
                    return
    target = next(v for _, vs in open_atoms for v in vs if v not in env)
    for val in A.carrier:
        new = dict(env)
        new[target] = val
        yield from _solve(A, atom_vars, new, unknowns)


def satisfy(A: Structure, phi: Formula, assignment: Mapping[str, Any]) -> Optional[Dict[str, Any]]:
    """Witnesses for the existential prefix of ``phi`` (as returned by
    :func:`~chasekit.syntax.prenex`), or ``None`` when ``A`` does not satisfy it."""
    missing = free_vars(phi) - set(assignment)
    if missing:
        raise KeyError(f"assignment undefined on {sorted(missing)}")
    bound, matrix = prenex(phi, pad=False, avoid=assignment)
    for sol in solutions(A, matrix, assignment, bound):
        return {v: sol[v] for v in bound}
    return None


def evaluate_query(A: Structure, query: Formula, assignment: Mapping[str, Any]) -> Optional[Tuple[int, Dict[str, Any]]]:
    """Least satisfied disjunct (0-based) and its witnesses."""
    parts = query.parts if isinstance(query, Disj) else (query,)
    for i, part in enumerate(parts):
        w = satisfy(A, part, assignment)
        if w is not None:
            return i, w
    return None


def evaluate(A: Structure, phi: Formula, assignment: Mapping[str, Any] = None) -> bool:
    assignment = assignment or {}
    if isinstance(phi, Disj):
        return evaluate_query(A, phi, assignment) is not None
    return satisfy(A, phi, assignment) is not None


def validates(A: Structure, sigma: Sequent) -> bool:
    """Every assignment satisfying the antecedent satisfies the consequent."""
    return counterexample(A, sigma) is None


def counterexample(A: Structure, sigma: Sequent) -> Optional[Dict[str, Any]]:
    bound, matrix = prenex(sigma.ante, pad=False, avoid=sigma.ctx)
    seen = set()
    for sol in solutions(A, matrix, {}, tuple(sigma.ctx) + bound):
        env = {v: sol[v] for v in sigma.ctx}
        key = tuple(env[v] for v in sigma.ctx)
        if key in seen:
            continue
        seen.add(key)
        if not evaluate(A, sigma.cons, env):
            return env
    return None


def is_model(A: Structure, T: Theory) -> bool:
    return all(validates(A, s) for s in T.axioms.values())


# -- homomorphisms ---------------------------------------------------------------


def is_homomorphism(src: Structure, tgt: Structure, mapping: Mapping[Any, Any]) -> bool:
    if any(e not in mapping or mapping[e] not in set(tgt.carrier) for e in src.carrier):
        return False
    for sym, table in src.rels.items():
        tt = tgt.rels.get(sym, frozenset())
        for t in table:
            if tuple(mapping[x] for x in t) not in tt:
                return False
    for sym, table in src.funs.items():
        tt = tgt.funs[sym]
        for args, v in table.items():
            if tt[tuple(mapping[x] for x in args)] != mapping[v]:
                return False
    return True


@dataclass(frozen=True, eq=False)
class Homomorphism:
    source: Structure
    target: Structure
    map: Mapping[Any, Any]

    def __post_init__(self):
        if not is_homomorphism(self.source, self.target, self.map):
            raise ValueError("map is not a homomorphism")

    def __call__(self, e):
        return self.map[e]

    def compose(self, after: "Homomorphism") -> "Homomorphism":
        """``after . self``"""
        return Homomorphism(self.source, after.target, {e: after.map[self.map[e]] for e in self.source.carrier})

    @classmethod
    def identity(cls, A: Structure) -> "Homomorphism":
        return cls(A, A, {e: e for e in A.carrier})

    @property
    def injective(self) -> bool:
        return len(set(self.map[e] for e in self.source.carrier)) == len(self.source.carrier)


def _constraints(B: Structure):
    """Per element of ``B``: the facts that become checkable once it is assigned."""
    order = {e: i for i, e in enumerate(B.carrier)}
    per: Dict[Any, list] = {e: [] for e in B.carrier}
    for sym, table in B.sorted_rels.items():
        for t in table:
            if t:
                last = max(t, key=order.__getitem__)
                per[last].append(("rel", sym, t))
    for sym, table in B.funs.items():
        for args, v in table.items():
            elems = list(args) + [v]
            last = max(elems, key=order.__getitem__)
            per[last].append(("fun", sym, args, v))
    return per


def _nullary_ok(B: Structure, M: Structure) -> bool:
    return all(() in M.rels[s] for s, t in B.rels.items() if () in t)


def _search(B, M, fixed, injective=False):
    if not _nullary_ok(B, M):
        return None
    per = _constraints(B)
    h = dict(fixed)
    targets = M.carrier

    def ok(e):
        for c in per[e]:
            if not all(x in h for x in (c[2] if c[0] == "rel" else tuple(c[2]) + (c[3],))):
                continue
            if c[0] == "rel":
                if tuple(h[x] for x in c[2]) not in M.rels[c[1]]:
                    return False
            else:
                if M.funs[c[1]][tuple(h[x] for x in c[2])] != h[c[3]]:
                    return False
        return True

    for e in B.carrier:
        if e in h and not ok(e):
            return None
    free = [e for e in B.carrier if e not in h]

    def go(i, used):
        if i == len(free):
            return True
        e = free[i]
        for m in targets:
            if injective and m in used:
                continue
            h[e] = m
            if ok(e) and all(ok(x) for x in B.carrier[B.carrier.index(e) + 1 :] if x in h):
                if go(i + 1, used | {m}):
                    return True
            del h[e]
        return False

    if go(0, frozenset(h.values()) if injective else frozenset()):
        return h
    return None


def hom_extend_search(f: Homomorphism, g: Homomorphism) -> Optional[Homomorphism]:
    """Some ``h : B -> M`` with ``h . g = f`` (``f : A -> M``, ``g : A -> B``)."""
    B, M = g.target, f.target
    fixed: Dict[Any, Any] = {}
    for a in g.source.carrier:
        b = g.map[a]
        if b in fixed and fixed[b] != f.map[a]:
            return None
        fixed[b] = f.map[a]
    h = _search(B, M, fixed)
    return None if h is None else Homomorphism(B, M, h)


def find_homomorphism(B: Structure, M: Structure, fixed: Mapping[Any, Any] = None) -> Optional[Homomorphism]:
    h = _search(B, M, dict(fixed or {}))
    return None if h is None else Homomorphism(B, M, h)


def find_isomorphism(A: Structure, B: Structure, fixed: Mapping[Any, Any] = None) -> Optional[Homomorphism]:
    if A.signature != B.signature or len(A.carrier) != len(B.carrier):
        return None
    if any(len(A.rels[s]) != len(B.rels[s]) for s in A.rels):
        return None
    h = _search(A, B, dict(fixed or {}), injective=True)
    return None if h is None else Homomorphism(A, B, h)


# -- representing structures and diagrams ---------------------------------------


@dataclass(frozen=True, eq=False)
class RepresentedStructure:
    structure: Structure
    canonical: Mapping[str, Any]

    def tuple_of(self, ctx: Sequence[str]) -> tuple:
        return tuple(self.canonical[v] for v in ctx)


def representing_structure(phi: Formula, ctx: Sequence[str], signature: Optional[Signature] = None) -> RepresentedStructure:
    """The canonical structure ``<ctx | phi>`` of a Horn formula over a relational signature.

    Elements are named after the first context variable of their class.
    """
    from .syntax import signature_of

    sig = signature or signature_of(phi)
    if not sig.relational:
        raise NotRelational("representing structures need a relational signature")
    try:
        conjuncts = horn_atoms(phi)
    except NotHorn:
        raise
    ctx = tuple(ctx)
    stray = free_vars(phi) - set(ctx)
    if stray:
        raise ValueError(f"{sorted(stray)} not in context {ctx}")
    uf = UnionFind(ctx)
    for a in conjuncts:
        if any(not isinstance(t, Var) for t in atom_terms(a)):
            raise NotRelational(f"non-variable term in {a!r}")
        if isinstance(a, Eq):
            uf.union(a.lhs.name, a.rhs.name)
    order = {v: i for i, v in enumerate(ctx)}
    rep: Dict[str, str] = {}
    for v in ctx:
        root = uf.find(v)
        members = [w for w in ctx if uf.find(w) == root]
        rep[v] = min(members, key=order.__getitem__)
    rels: Dict[str, set] = {s: set() for s in sig.rels}
    for a in conjuncts:
        if isinstance(a, Rel):
            rels[a.sym].add(tuple(rep[t.name] for t in a.args))
    S = Structure(sig, tuple(sorted(set(rep.values()), key=order.__getitem__)), rels)
    return RepresentedStructure(S, dict(rep))


@dataclass(frozen=True, eq=False)
class Diagram:
    signature: Signature
    theory: Theory
    constant_of: Mapping[Any, str]


def element_name(e: Any) -> str:
    return e if isinstance(e, str) else str(e)


def diagram(A: Structure, names: Mapping[Any, str] = None) -> Diagram:
    """``Sigma + |A|`` and ``Diag(A)``: one axiom ``true |- alpha`` per fact of ``A``."""
    names = names or {}
    const_of = {e: "c_" + names.get(e, element_name(e)) for e in A.carrier}
    if len(set(const_of.values())) != len(const_of):
        raise ValueError("element names collide")
    clash = set(const_of.values()) & (set(A.signature.funs) | set(A.signature.rels))
    if clash:
        raise ValueError(f"diagram constants clash with the signature: {sorted(clash)}")
    sig = A.signature.extend(funs={c: 0 for c in const_of.values()})
    c = lambda e: App(const_of[e], ())  # noqa: E731
    axioms = {}
    k = 0
    for sym in sorted(A.rels):
        for t in A.sorted_rels[sym]:
            axioms[f"d{k}"] = Sequent((), TOP, Rel(sym, tuple(c(x) for x in t)))
            k += 1
    for sym in sorted(A.funs):
        for args in sorted(A.funs[sym], key=tuple_key):
            v = A.funs[sym][args]
            axioms[f"d{k}"] = Sequent((), TOP, Eq(App(sym, tuple(c(x) for x in args)), c(v)))
            k += 1
    return Diagram(sig, Theory(sig, axioms), const_of)


# -- equality as a predicate -----------------------------------------------------


def e_expand(A: Structure, E: str = "E") -> Structure:
    """Interpret the new binary predicate ``E`` as equality."""
    if E in A.signature.rels or E in A.signature.funs:
        raise ValueError(f"{E} already in the signature")
    sig = A.signature.extend(rels={E: 2})
    rels = dict(A.rels)
    rels[E] = {(x, x) for x in A.carrier}
    return Structure(sig, A.carrier, rels, A.funs)


def check_e_structure(B: Structure, E: str = "E", relations: bool = True) -> Optional[str]:
    """``None`` when ``E`` is a congruence on ``B``; otherwise a reason.

    With ``relations=False`` relation tables are not required to respect
    ``E`` (their image under the quotient is still well defined).
    """
    table = B.rels.get(E)
    if table is None:
        return f"no relation {E}"
    for x in B.carrier:
        if (x, x) not in table:
            return f"{E} not reflexive at {x!r}"
    for (x, y) in table:
        if (y, x) not in table:
            return f"{E} not symmetric at {(x, y)!r}"
        for z in B.carrier:
            if (y, z) in table and (x, z) not in table:
                return f"{E} not transitive at {(x, y, z)!r}"
    classes = _classes(B, E)
    for sym, tab in B.rels.items() if relations else ():
        if sym == E:
            continue
        for t in tab:
            for i, x in enumerate(t):
                for x2 in classes[x]:
                    t2 = t[:i] + (x2,) + t[i + 1 :]
                    if t2 not in tab:
                        return f"{sym} does not respect {E} at {t!r}"
    for sym, tab in B.funs.items():
        for args, v in tab.items():
            for i, x in enumerate(args):
                for x2 in classes[x]:
                    a2 = args[:i] + (x2,) + args[i + 1 :]
                    if (tab[a2], v) not in table:
                        return f"{sym} does not respect {E} at {args!r}"
    return None


def _classes(B: Structure, E: str) -> Dict[Any, list]:
    uf = UnionFind(B.carrier)
    for (x, y) in B.rels[E]:
        uf.union(x, y)
    groups: Dict[Any, list] = {}
    for x in B.carrier:
        groups.setdefault(uf.find(x), []).append(x)
    return {x: groups[uf.find(x)] for x in B.carrier}


def quotient_map(B: Structure, E: str = "E") -> Dict[Any, Any]:
    """Each element to the least member of its ``E``-class."""
    return {x: min(cls, key=element_key) for x, cls in _classes(B, E).items()}


def q_quotient(B: Structure, E: str = "E", with_map: bool = False, strict: bool = False):
    """Quotient ``B`` by ``E`` (least element represents its class).

    ``E`` must be an equivalence respected by the function tables; relation
    tables are imaged.  ``strict`` demands that ``B`` be a model of ``E_Sigma``.
    """
    reason = check_e_structure(B, E, relations=strict)
    if reason is not None:
        raise NotAnEStructure(reason)
    q = quotient_map(B, E)
    sig = Signature(dict(B.signature.funs), {s: n for s, n in B.signature.rels.items() if s != E})
    rels = {s: {tuple(q[x] for x in t) for t in tab} for s, tab in B.rels.items() if s != E}
    funs = {s: {tuple(q[x] for x in a): q[v] for a, v in tab.items()} for s, tab in B.funs.items()}
    Q = Structure(sig, tuple(set(q.values())), rels, funs)
    return (Q, q) if with_map else Q


def reduct(A: Structure, signature: Signature) -> Structure:
    return Structure(
        signature,
        A.carrier,
        {s: A.rels[s] for s in signature.rels},
        {s: A.funs[s] for s in signature.funs},
    )
