"""Terms, formulas in context, sequents and theories.

Formulas are immutable trees.  ``Conj(())`` is truth; a conjunction never has
exactly one conjunct (use :func:`conj` to build canonical conjunctions).
``Disj`` only appears as the consequent of a geometric sequent.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .errors import (
    ArityMismatch,
    NotASubcontext,
    NotHorn,
    NotRegular,
    UnboundVariable,
    UnknownSymbol,
)


# -- terms ------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    sym: str
    args: Tuple["Term", ...] = ()

    def __repr__(self) -> str:
        if not self.args:
            return self.sym
        return f"{self.sym}({','.join(map(repr, self.args))})"


Term = Union[Var, App]


def const(name: str) -> App:
    return App(name, ())


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Rel:
    sym: str
    args: Tuple[Term, ...] = ()


Atom = Union[Eq, Rel]


@dataclass(frozen=True)
class Conj:
    parts: Tuple["Formula", ...] = ()

    def __post_init__(self):
        if len(self.parts) == 1:
            raise ValueError("a conjunction needs zero or at least two conjuncts")


@dataclass(frozen=True)
class Exists:
    vars: Tuple[str, ...]
    body: "Formula"

    def __post_init__(self):
        if not self.vars:
            raise ValueError("empty existential prefix")
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"duplicate bound variables {self.vars}")


@dataclass(frozen=True)
class Disj:
    parts: Tuple["Formula", ...] = ()


Formula = Union[Eq, Rel, Conj, Exists, Disj]

TOP = Conj(())


def is_atom(phi) -> bool:
    return isinstance(phi, (Eq, Rel))


def conj(*parts: Formula) -> Formula:
    """Flattened conjunction; truth disappears and a single conjunct is returned bare."""
    flat = []
    for p in parts:
        if isinstance(p, Conj):
            flat.extend(_flatten_conj(p))
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return Conj(tuple(flat))


def _flatten_conj(c: Conj):
    for p in c.parts:
        if isinstance(p, Conj):
            yield from _flatten_conj(p)
        else:
            yield p


def exists(vars: Sequence[str], body: Formula) -> Formula:
    vars = tuple(vars)
    if not vars:
        return body
    return Exists(vars, body)


def disj(*parts: Formula) -> Disj:
    return Disj(tuple(parts))


# -- contexts and fresh names -----------------------------------------------

_TRAILING_DIGITS = re.compile(r"\d+$")


def fresh_var(base: str, avoid: Iterable[str]) -> str:
    """Deterministic fresh name ``base0, base1, ...`` outside ``avoid``."""
    avoid = set(avoid)
    stem = _TRAILING_DIGITS.sub("", base) or "v"
    k = 0
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


def fresh_vars(bases: Sequence[str], avoid: Iterable[str]) -> Tuple[str, ...]:
    avoid = set(avoid)
    out = []
    for b in bases:
        v = fresh_var(b, avoid)
        avoid.add(v)
        out.append(v)
    return tuple(out)


def ctx_eq(a: Sequence[str], b: Sequence[str]) -> bool:
    return set(a) == set(b) and len(set(a)) == len(a) and len(set(b)) == len(b)


def check_context(ctx: Sequence[str]) -> Tuple[str, ...]:
    ctx = tuple(ctx)
    if len(set(ctx)) != len(ctx):
        raise ValueError(f"duplicate variable in context {ctx}")
    return ctx


# -- traversal --------------------------------------------------------------


def term_vars(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    else:
        for a in t.args:
            yield from term_vars(a)


def atom_terms(a: Atom) -> Tuple[Term, ...]:
    return (a.lhs, a.rhs) if isinstance(a, Eq) else a.args


def _free_ordered(phi, bound, out):
    if is_atom(phi):
        for t in atom_terms(phi):
            for v in term_vars(t):
                if v not in bound and v not in out:
                    out[v] = None
    elif isinstance(phi, (Conj, Disj)):
        for p in phi.parts:
            _free_ordered(p, bound, out)
    elif isinstance(phi, Exists):
        _free_ordered(phi.body, bound | set(phi.vars), out)
    else:
        raise TypeError(f"not a formula: {phi!r}")


def free_var_list(phi: Formula) -> Tuple[str, ...]:
    """Free variables in order of first occurrence."""
    out: dict = {}
    _free_ordered(phi, frozenset(), out)
    return tuple(out)


def free_vars(phi: Formula) -> frozenset:
    return frozenset(free_var_list(phi))


def all_var_names(phi: Formula) -> set:
    """Free and bound variable names."""
    names = set()
    for node in walk(phi):
        if isinstance(node, Exists):
            names.update(node.vars)
        elif is_atom(node):
            for t in atom_terms(node):
                names.update(term_vars(t))
    return names


def walk(phi: Formula) -> Iterator[Formula]:
    yield phi
    if isinstance(phi, (Conj, Disj)):
        for p in phi.parts:
            yield from walk(p)
    elif isinstance(phi, Exists):
        yield from walk(phi.body)


def atoms(phi: Formula) -> Iterator[Atom]:
    for node in walk(phi):
        if is_atom(node):
            yield node


def relation_multiset(phi: Formula) -> Counter:
    return Counter(a.sym for a in atoms(phi) if isinstance(a, Rel))


def _term_syms(t: Term, out: set):
    if isinstance(t, App):
        out.add((t.sym, len(t.args)))
        for a in t.args:
            _term_syms(a, out)


def function_symbols(phi: Formula) -> set:
    """``(name, arity)`` pairs of function symbols (incl. constants) used."""
    out: set = set()
    for a in atoms(phi):
        for t in atom_terms(a):
            _term_syms(t, out)
    return out


def has_equality(phi: Formula) -> bool:
    return any(isinstance(a, Eq) for a in atoms(phi))


def horn_atoms(phi: Formula) -> Tuple[Atom, ...]:
    """The conjuncts of a Horn formula, left to right."""
    if is_atom(phi):
        return (phi,)
    if isinstance(phi, Conj):
        out = []
        for p in phi.parts:
            out.extend(horn_atoms(p))
        return tuple(out)
    raise NotHorn(f"not a Horn formula: {phi!r}")


# -- substitution -----------------------------------------------------------


def subst_term(t: Term, m: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return m.get(t.name, t)
    if not t.args:
        return t
    return App(t.sym, tuple(subst_term(a, m) for a in t.args))


def subst(phi: Formula, m: Mapping[str, Term]) -> Formula:
    """Simultaneous capture-avoiding substitution; unmapped variables stay put."""
    if isinstance(phi, Eq):
        return Eq(subst_term(phi.lhs, m), subst_term(phi.rhs, m))
    if isinstance(phi, Rel):
        return Rel(phi.sym, tuple(subst_term(a, m) for a in phi.args))
    if isinstance(phi, Conj):
        return Conj(tuple(subst(p, m) for p in phi.parts))
    if isinstance(phi, Disj):
        return Disj(tuple(subst(p, m) for p in phi.parts))
    if isinstance(phi, Exists):
        fv = free_vars(phi)
        inner = {k: v for k, v in m.items() if k not in phi.vars and k in fv}
        image_vars = set()
        for t in inner.values():
            image_vars.update(term_vars(t))
        clash = [v for v in phi.vars if v in image_vars]
        if not clash:
            return Exists(phi.vars, subst(phi.body, inner))
        avoid = image_vars | all_var_names(phi) | set(inner)
        renamed = []
        for v in phi.vars:
            if v in image_vars:
                nv = fresh_var(v, avoid)
                avoid.add(nv)
                inner[v] = Var(nv)
                renamed.append(nv)
            else:
                renamed.append(v)
        return Exists(tuple(renamed), subst(phi.body, inner))
    raise TypeError(f"not a formula: {phi!r}")


def substitute(
    phi: Formula,
    assignment: Mapping[str, Term],
    ctx: Optional[Sequence[str]] = None,
    target_ctx: Optional[Sequence[str]] = None,
) -> Formula:
    """Checked substitution ``phi[f]`` for ``f : ctx -> Tm(target_ctx)``."""
    domain = tuple(ctx) if ctx is not None else free_var_list(phi)
    missing = [v for v in domain if v not in assignment]
    missing += [v for v in free_var_list(phi) if v not in assignment and v not in missing]
    if missing:
        raise UnboundVariable(f"assignment undefined on {missing}")
    if target_ctx is not None:
        allowed = set(target_ctx)
        for v in domain:
            stray = set(term_vars(assignment[v])) - allowed
            if stray:
                raise UnboundVariable(f"image of {v} uses {sorted(stray)} outside target context")
    return subst(phi, {v: assignment[v] for v in domain})


def weaken(phi: Formula, frm: Sequence[str], to: Sequence[str]) -> Formula:
    """View ``phi`` in a larger context (a no-op on the tree)."""
    if not set(frm) <= set(to):
        raise NotASubcontext(f"{tuple(frm)} is not contained in {tuple(to)}")
    stray = free_vars(phi) - set(frm)
    if stray:
        raise UnboundVariable(f"{sorted(stray)} not in context {tuple(frm)}")
    return phi


# -- alpha equivalence ------------------------------------------------------


def canonical(phi: Formula) -> Formula:
    """Rename bound variables to ``#0, #1, ...`` in traversal order."""
    counter = [0]

    def go(f, env):
        if is_atom(f):
            return subst(f, env) if env else f
        if isinstance(f, Conj):
            return Conj(tuple(go(p, env) for p in f.parts))
        if isinstance(f, Disj):
            return Disj(tuple(go(p, env) for p in f.parts))
        new_env = dict(env)
        names = []
        for v in f.vars:
            nv = f"#{counter[0]}"
            counter[0] += 1
            new_env[v] = Var(nv)
            names.append(nv)
        return Exists(tuple(names), go(f.body, new_env))

    return go(phi, {})


def alpha_eq(a: Formula, b: Formula) -> bool:
    return a == b or canonical(a) == canonical(b)


# -- fragments ---------------------------------------------------------------


class Fragment(enum.IntEnum):
    HORN = 0
    REGULAR = 1
    GEOMETRIC = 2
    FIRST_ORDER_UNSUPPORTED = 3

    def __str__(self) -> str:
        return self.name.lower().replace("_", "-")


def classify_fragment(x) -> Fragment:
    if isinstance(x, Sequent):
        return max(classify_fragment(x.ante), classify_fragment(x.cons))
    if isinstance(x, Theory):
        return max((classify_fragment(s) for s in x.axioms.values()), default=Fragment.HORN)
    frag = Fragment.HORN
    for node in walk(x):
        if isinstance(node, Disj):
            return Fragment.GEOMETRIC
        if isinstance(node, Exists):
            frag = Fragment.REGULAR
        elif not isinstance(node, (Conj, Eq, Rel)):
            return Fragment.FIRST_ORDER_UNSUPPORTED
    return frag


# -- prenex form -------------------------------------------------------------


def prenex(phi: Formula, pad: bool = True, avoid: Iterable[str] = ()) -> Tuple[Tuple[str, ...], Tuple[Atom, ...]]:
    """Pull every existential to the front: ``phi`` becomes ``exists bound. /\\ matrix``.

    Bound variables keep their names unless they clash with a free variable,
    another bound variable, or ``avoid``.  With ``pad`` every bound variable
    occurs in the matrix, adding ``y = y`` where needed.
    """
    used = set(free_vars(phi)) | set(avoid)
    bound: list = []
    matrix: list = []

    def go(f, env):
        if is_atom(f):
            matrix.append(subst(f, env) if env else f)
        elif isinstance(f, Conj):
            for p in f.parts:
                go(p, env)
        elif isinstance(f, Exists):
            env = dict(env)
            for v in f.vars:
                nv = v if v not in used else fresh_var(v, used)
                used.add(nv)
                bound.append(nv)
                if nv != v or v in env:
                    env[v] = Var(nv)
            go(f.body, env)
        elif isinstance(f, Disj):
            raise NotRegular(f"disjunction inside a regular formula: {f!r}")
        else:
            raise NotRegular(f"unsupported connective: {f!r}")

    go(phi, {})
    if pad:
        present = set()
        for a in matrix:
            for t in atom_terms(a):
                present.update(term_vars(t))
        for y in bound:
            if y not in present:
                matrix.append(Eq(Var(y), Var(y)))
    return tuple(bound), tuple(matrix)


# -- signatures, sequents, theories -----------------------------------------


@dataclass(frozen=True)
class Signature:
    funs: Mapping[str, int] = field(default_factory=dict)
    rels: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for table in (self.funs, self.rels):
            for name, ar in table.items():
                if ar < 0:
                    raise ArityMismatch(f"negative arity for {name}")

    @property
    def relational(self) -> bool:
        return not self.funs

    @property
    def constants(self) -> Tuple[str, ...]:
        return tuple(f for f, n in self.funs.items() if n == 0)

    def extend(self, funs: Mapping[str, int] = (), rels: Mapping[str, int] = ()) -> "Signature":
        f = dict(self.funs)
        f.update(dict(funs))
        r = dict(self.rels)
        r.update(dict(rels))
        return Signature(f, r)

    def check_term(self, t: Term, ctx: Optional[Sequence[str]] = None) -> None:
        if isinstance(t, Var):
            if ctx is not None and t.name not in ctx:
                raise UnboundVariable(f"variable {t.name} not in context {tuple(ctx)}")
            return
        if t.sym not in self.funs:
            raise UnknownSymbol(f"undeclared function symbol {t.sym}")
        if self.funs[t.sym] != len(t.args):
            raise ArityMismatch(f"{t.sym} expects {self.funs[t.sym]} arguments, got {len(t.args)}")
        for a in t.args:
            self.check_term(a, ctx)

    def check_formula(self, phi: Formula, ctx: Optional[Sequence[str]] = None) -> None:
        """Raise unless ``phi`` is well formed (and well scoped in ``ctx``)."""
        if isinstance(phi, Eq):
            self.check_term(phi.lhs, ctx)
            self.check_term(phi.rhs, ctx)
        elif isinstance(phi, Rel):
            if phi.sym not in self.rels:
                raise UnknownSymbol(f"undeclared relation symbol {phi.sym}")
            if self.rels[phi.sym] != len(phi.args):
                raise ArityMismatch(f"{phi.sym} expects {self.rels[phi.sym]} arguments, got {len(phi.args)}")
            for a in phi.args:
                self.check_term(a, ctx)
        elif isinstance(phi, (Conj, Disj)):
            for p in phi.parts:
                self.check_formula(p, ctx)
        elif isinstance(phi, Exists):
            inner = None
            if ctx is not None:
                if set(phi.vars) & set(ctx):
                    raise UnboundVariable(f"bound variables {phi.vars} shadow the context {tuple(ctx)}")
                inner = tuple(ctx) + phi.vars
            self.check_formula(phi.body, inner)
        else:
            raise TypeError(f"not a formula: {phi!r}")


def signature_of(*formulas: Formula) -> Signature:
    """Smallest signature in which the formulas are well formed."""
    funs: dict = {}
    rels: dict = {}
    for phi in formulas:
        for name, ar in sorted(function_symbols(phi)):
            funs.setdefault(name, ar)
        for a in atoms(phi):
            if isinstance(a, Rel):
                rels.setdefault(a.sym, len(a.args))
    return Signature(funs, rels)


@dataclass(frozen=True)
class Sequent:
    ctx: Tuple[str, ...]
    ante: Formula
    cons: Formula

    def __post_init__(self):
        object.__setattr__(self, "ctx", check_context(self.ctx))

    @property
    def fragment(self) -> Fragment:
        return classify_fragment(self)

    def check(self, sig: Optional[Signature] = None) -> None:
        for side in (self.ante, self.cons):
            stray = free_vars(side) - set(self.ctx)
            if stray:
                raise UnboundVariable(f"{sorted(stray)} not in sequent context {self.ctx}")
            if sig is not None:
                sig.check_formula(side, None)

    def alpha_eq(self, other: "Sequent") -> bool:
        return (
            ctx_eq(self.ctx, other.ctx)
            and alpha_eq(self.ante, other.ante)
            and alpha_eq(self.cons, other.cons)
        )

    def substitute(self, m: Mapping[str, Term], ctx: Sequence[str]) -> "Sequent":
        return Sequent(tuple(ctx), subst(self.ante, m), subst(self.cons, m))


@dataclass(frozen=True)
class Theory:
    signature: Signature
    axioms: Mapping[str, Sequent] = field(default_factory=dict)

    def __post_init__(self):
        for name, s in self.axioms.items():
            try:
                s.check(self.signature)
            except Exception as exc:
                raise type(exc)(f"axiom {name}: {exc}") from None

    @property
    def fragment(self) -> Fragment:
        return classify_fragment(self)

    @property
    def has_equality(self) -> bool:
        return any(has_equality(s.ante) or has_equality(s.cons) for s in self.axioms.values())

    def mentions(self, symbol: str) -> bool:
        for s in self.axioms.values():
            for side in (s.ante, s.cons):
                if any(name == symbol for name, _ in function_symbols(side)):
                    return True
                if any(isinstance(a, Rel) and a.sym == symbol for a in atoms(side)):
                    return True
        return False

    def with_axioms(self, axioms: Mapping[str, Sequent], signature: Optional[Signature] = None) -> "Theory":
        return Theory(signature or self.signature, dict(axioms))
