"""Derivations in the single-antecedent sequent calculus and their checker.

Rule tags and what a node ``ante |-[ctx] cons`` must look like:

=================  ===========================================================
Identity           ``phi |- phi``
TheoryAxiom{n}     axiom ``n`` of the theory, context possibly enlarged
Cut                premises ``phi |- chi`` and ``chi |- psi``
Substitution{s}    premise over ``xs``; conclusion is the premise with ``s`` applied
Weaken             premise in a smaller context
AndIntro           premises ``phi |- psi_i``; conclusion ``phi |- psi_1 & ... & psi_n``
AndElim{i}         ``psi_0 & ... & psi_n |- psi_i``
TopIntro           ``phi |- true``
EqRefl             ``true |- t = t``
EqSubst{k}         ``x1 = y1 & ... & xk = yk & theta |- theta[ys/xs]``
ExistsAdjunction   the double rule ``exists ys. phi |-[xs] psi`` over
                   ``phi |-[xs,ys] psi``; ``down`` reads it top to bottom
Frobenius          ``phi & (exists ys. psi) |- exists ys. (phi & psi)``
OrIntro{i}         ``psi_i |- psi_0 | ... | psi_n``
OrElim             premises ``psi_i |- theta``; conclusion ``psi_0 | ... |- theta``
=================  ===========================================================

Formulas are compared up to renaming of bound variables, contexts as sets.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import ParseError
from .syntax import (
    TOP,
    Conj,
    Disj,
    Eq,
    Exists,
    Formula,
    Sequent,
    Term,
    Theory,
    Var,
    alpha_eq,
    free_vars,
    subst,
    term_vars,
)

RULES = (
    "Identity",
    "TheoryAxiom",
    "Cut",
    "Substitution",
    "Weaken",
    "AndIntro",
    "AndElim",
    "TopIntro",
    "EqRefl",
    "EqSubst",
    "ExistsAdjunction",
    "Frobenius",
    "OrIntro",
    "OrElim",
)


@dataclass(frozen=True, eq=False)
class Derivation:
    rule: str
    conclusion: Sequent
    children: Tuple["Derivation", ...] = ()
    payload: Any = None

    @property
    def ctx(self):
        return self.conclusion.ctx

    @property
    def ante(self):
        return self.conclusion.ante

    @property
    def cons(self):
        return self.conclusion.cons

    def nodes(self):
        """Pre-order walk yielding ``(path, node)``."""
        stack = [((), self)]
        while stack:
            path, d = stack.pop()
            yield path, d
            for i in range(len(d.children) - 1, -1, -1):
                stack.append((path + (i,), d.children[i]))

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def rule_multiset(self) -> Counter:
        return Counter(d.rule for _, d in self.nodes())

    def axioms_used(self) -> List[str]:
        return list(dict.fromkeys(d.payload for _, d in self.nodes() if d.rule == "TheoryAxiom"))


def same_tree(a: Derivation, b: Derivation) -> bool:
    """Structural equality, formulas compared syntactically."""
    if a is b:
        return True
    if a.rule != b.rule or a.conclusion != b.conclusion or a.payload != b.payload:
        return False
    return len(a.children) == len(b.children) and all(same_tree(x, y) for x, y in zip(a.children, b.children))


# -- checking ------------------------------------------------------------------


@dataclass
class CheckResult:
    ok: bool
    path: Optional[Tuple[int, ...]] = None
    rule: Optional[str] = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok

    @property
    def where(self) -> str:
        if self.path is None:
            return ""
        return "root" + "".join(f".{i}" for i in self.path)

    def __str__(self) -> str:
        if self.ok:
            return "OK"
        return f"FAIL at {self.where} ({self.rule}): {self.message}"


def _same_ctx(a, b) -> bool:
    return set(a) == set(b)


def _arity(d: Derivation, n: Optional[int]) -> Optional[str]:
    if n is not None and len(d.children) != n:
        return f"expected {n} premises, found {len(d.children)}"
    return None


def _check_node(d: Derivation, T: Theory) -> Optional[str]:
    s = d.conclusion
    for side in (s.ante, s.cons):
        stray = free_vars(side) - set(s.ctx)
        if stray:
            return f"{sorted(stray)} not in context {list(s.ctx)}"
    r, p, ch = d.rule, d.payload, d.children
    if r == "Identity":
        return _arity(d, 0) or (None if alpha_eq(s.ante, s.cons) else "antecedent and consequent differ")
    if r == "TheoryAxiom":
        if _arity(d, 0):
            return _arity(d, 0)
        ax = T.axioms.get(p) if T is not None else None
        if ax is None:
            return f"no axiom named {p!r}"
        if not set(ax.ctx) <= set(s.ctx):
            return f"context {list(s.ctx)} does not contain the axiom context {list(ax.ctx)}"
        if not (alpha_eq(ax.ante, s.ante) and alpha_eq(ax.cons, s.cons)):
            return f"conclusion does not match axiom {p}"
        return None
    if r == "Cut":
        if _arity(d, 2):
            return _arity(d, 2)
        a, b = ch
        if not (_same_ctx(a.ctx, s.ctx) and _same_ctx(b.ctx, s.ctx)):
            return "premise contexts differ from the conclusion"
        if not alpha_eq(a.cons, b.ante):
            return "cut formulas do not match"
        if not alpha_eq(a.ante, s.ante) or not alpha_eq(b.cons, s.cons):
            return "conclusion is not composed from the premises"
        return None
    if r == "Substitution":
        if _arity(d, 1):
            return _arity(d, 1)
        m = dict(p or ())
        (c,) = ch
        if set(m) != set(c.ctx):
            return f"assignment domain {sorted(m)} is not the premise context {sorted(c.ctx)}"
        for v, t in m.items():
            stray = set(term_vars(t)) - set(s.ctx)
            if stray:
                return f"image of {v} uses {sorted(stray)} outside the context"
        if not (alpha_eq(subst(c.ante, m), s.ante) and alpha_eq(subst(c.cons, m), s.cons)):
            return "conclusion is not the substituted premise"
        return None
    if r == "Weaken":
        if _arity(d, 1):
            return _arity(d, 1)
        (c,) = ch
        if not set(c.ctx) <= set(s.ctx):
            return "premise context is not a subcontext"
        if not (alpha_eq(c.ante, s.ante) and alpha_eq(c.cons, s.cons)):
            return "formulas changed"
        return None
    if r == "AndIntro":
        if not isinstance(s.cons, Conj) or len(s.cons.parts) != len(ch) or len(ch) < 2:
            return "consequent must be a conjunction with one part per premise"
        for c, part in zip(ch, s.cons.parts):
            if not _same_ctx(c.ctx, s.ctx) or not alpha_eq(c.ante, s.ante) or not alpha_eq(c.cons, part):
                return "premise does not match its conjunct"
        return None
    if r == "AndElim":
        if _arity(d, 0):
            return _arity(d, 0)
        if not isinstance(s.ante, Conj) or not isinstance(p, int) or not 0 <= p < len(s.ante.parts):
            return "antecedent is not a conjunction with that conjunct"
        return None if alpha_eq(s.ante.parts[p], s.cons) else "consequent is not the selected conjunct"
    if r == "TopIntro":
        return _arity(d, 0) or (None if s.cons == TOP else "consequent must be true")
    if r == "EqRefl":
        if _arity(d, 0):
            return _arity(d, 0)
        ok = s.ante == TOP and isinstance(s.cons, Eq) and s.cons.lhs == s.cons.rhs
        return None if ok else "expected true |- t = t"
    if r == "EqSubst":
        if _arity(d, 0):
            return _arity(d, 0)
        k = p
        if not isinstance(s.ante, Conj) or not isinstance(k, int) or len(s.ante.parts) != k + 1 or k < 1:
            return "antecedent must be k equalities followed by a formula"
        m = {}
        for e in s.ante.parts[:k]:
            if not (isinstance(e, Eq) and isinstance(e.lhs, Var) and isinstance(e.rhs, Var)):
                return "rewriting equalities must be between variables"
            if e.lhs.name in m:
                return "rewritten variables must be distinct"
            m[e.lhs.name] = e.rhs
        theta = s.ante.parts[k]
        return None if alpha_eq(subst(theta, m), s.cons) else "consequent is not the rewritten formula"
    if r == "ExistsAdjunction":
        if _arity(d, 1):
            return _arity(d, 1)
        try:
            direction, vs = p
            vs = tuple(vs)
        except (TypeError, ValueError):
            return "payload must be (direction, variables)"
        (c,) = ch
        if direction == "down":
            big, small = c, s
        elif direction == "up":
            big, small = s, c
        else:
            return f"unknown direction {direction!r}"
        if not vs or len(set(vs)) != len(vs) or set(vs) & set(small.ctx):
            return "bound variables must be new and distinct"
        if set(big.ctx) != set(small.ctx) | set(vs):
            return "contexts do not differ by the bound variables"
        if not alpha_eq(small.ante, Exists(vs, big.ante)) or not alpha_eq(small.cons, big.cons):
            return "formulas do not match the adjunction"
        return None
    if r == "Frobenius":
        if _arity(d, 0):
            return _arity(d, 0)
        a = s.ante
        if not (isinstance(a, Conj) and len(a.parts) == 2 and isinstance(a.parts[1], Exists)):
            return "antecedent must be phi & exists ys. psi"
        phi, ex = a.parts
        if set(ex.vars) & free_vars(phi):
            return "bound variables occur free in the other conjunct"
        want = Exists(ex.vars, Conj((phi, ex.body)))
        return None if alpha_eq(want, s.cons) else "consequent does not match"
    if r == "OrIntro":
        if _arity(d, 0):
            return _arity(d, 0)
        if not isinstance(s.cons, Disj) or not isinstance(p, int) or not 0 <= p < len(s.cons.parts):
            return "consequent is not a disjunction with that disjunct"
        return None if alpha_eq(s.cons.parts[p], s.ante) else "antecedent is not the selected disjunct"
    if r == "OrElim":
        if not isinstance(s.ante, Disj) or len(s.ante.parts) != len(ch):
            return "antecedent must be a disjunction with one part per premise"
        for c, part in zip(ch, s.ante.parts):
            if not _same_ctx(c.ctx, s.ctx) or not alpha_eq(c.ante, part) or not alpha_eq(c.cons, s.cons):
                return "premise does not match its disjunct"
        return None
    return f"unknown rule {r!r}"


def check_derivation(d: Derivation, T: Optional[Theory] = None) -> CheckResult:
    """Validate every node; report the first failure in pre-order."""
    seen = set()
    for path, node in d.nodes():
        if id(node) in seen:
            continue
        msg = _check_node(node, T)
        if msg:
            return CheckResult(False, path, node.rule, msg)
        seen.add(id(node))
    return CheckResult(True)


# -- builders --------------------------------------------------------------------


def _seq(ctx, ante, cons) -> Sequent:
    return Sequent(tuple(ctx), ante, cons)


def identity(ctx, phi: Formula) -> Derivation:
    return Derivation("Identity", _seq(ctx, phi, phi))


def axiom(T: Theory, name: str, ctx=None) -> Derivation:
    ax = T.axioms[name]
    return Derivation("TheoryAxiom", _seq(ctx if ctx is not None else ax.ctx, ax.ante, ax.cons), (), name)


def cut(a: Derivation, b: Derivation) -> Derivation:
    return Derivation("Cut", _seq(a.ctx, a.ante, b.cons), (a, b))


def substitution(d: Derivation, m: Mapping[str, Term], ctx) -> Derivation:
    m = {v: m.get(v, Var(v)) for v in d.ctx}
    payload = tuple(sorted(m.items()))
    return Derivation("Substitution", _seq(ctx, subst(d.ante, m), subst(d.cons, m)), (d,), payload)


def weaken(d: Derivation, ctx) -> Derivation:
    if set(ctx) == set(d.ctx):
        return d
    return Derivation("Weaken", _seq(ctx, d.ante, d.cons), (d,))


def and_intro(ds: Sequence[Derivation]) -> Derivation:
    ds = tuple(ds)
    if len(ds) == 1:
        return ds[0]
    if not ds:
        raise ValueError("and_intro needs premises; use top_intro")
    return Derivation("AndIntro", _seq(ds[0].ctx, ds[0].ante, Conj(tuple(d.cons for d in ds))), ds)


def and_elim(ctx, c: Conj, i: int) -> Derivation:
    return Derivation("AndElim", _seq(ctx, c, c.parts[i]), (), i)


def top_intro(ctx, phi: Formula) -> Derivation:
    return Derivation("TopIntro", _seq(ctx, phi, TOP))


def eq_refl(ctx, t: Term) -> Derivation:
    return Derivation("EqRefl", _seq(ctx, TOP, Eq(t, t)))


def eq_subst(ctx, pairs: Sequence[Tuple[str, str]], theta: Formula) -> Derivation:
    eqs = tuple(Eq(Var(x), Var(y)) for x, y in pairs)
    m = {x: Var(y) for x, y in pairs}
    return Derivation("EqSubst", _seq(ctx, Conj(eqs + (theta,)), subst(theta, m)), (), len(pairs))


def exists_down(d: Derivation, vs: Sequence[str]) -> Derivation:
    """From ``phi |-[xs,ys] psi`` to ``exists ys. phi |-[xs] psi``."""
    vs = tuple(vs)
    if not vs:
        return d
    ctx = tuple(v for v in d.ctx if v not in vs)
    return Derivation("ExistsAdjunction", _seq(ctx, Exists(vs, d.ante), d.cons), (d,), ("down", vs))


def exists_up(d: Derivation, vs: Sequence[str], body: Formula) -> Derivation:
    """From ``exists ys. body |-[xs] psi`` to ``body |-[xs,ys] psi``."""
    vs = tuple(vs)
    if not vs:
        return d
    return Derivation("ExistsAdjunction", _seq(tuple(d.ctx) + vs, body, d.cons), (d,), ("up", vs))


def frobenius(ctx, phi: Formula, ex: Exists) -> Derivation:
    return Derivation("Frobenius", _seq(ctx, Conj((phi, ex)), Exists(ex.vars, Conj((phi, ex.body)))))


def or_intro(ctx, d: Disj, i: int) -> Derivation:
    return Derivation("OrIntro", _seq(ctx, d.parts[i], d), (), i)


def or_elim(ds: Sequence[Derivation], d: Disj) -> Derivation:
    ds = tuple(ds)
    return Derivation("OrElim", _seq(ds[0].ctx, d, ds[0].cons), ds)


def exists_intro(ctx, body: Formula, vs: Sequence[str]) -> Derivation:
    """``body |-[ctx,vs] exists vs. body`` with ``vs`` disjoint from ``ctx``."""
    vs = tuple(vs)
    if not vs:
        return identity(ctx, body)
    ex = Exists(vs, body)
    return exists_up(identity(ctx, ex), vs, body)


# -- derivation files -----------------------------------------------------------------
#
#   file     ::= { line }
#   line     ::= comment | step
#   comment  ::= "#" text
#   step     ::= id ":" rule [ "{" payload "}" ] [ "<-" id { "," id } ] "::" sequent
#   payload  ::= axiom-name                         (TheoryAxiom)
#              | [ var ":=" term { "," var ":=" term } ]   (Substitution)
#              | integer                            (AndElim, EqSubst, OrIntro)
#              | ("down" | "up") ":" var { var }    (ExistsAdjunction)
#
# Premises must be defined on earlier lines; the last step is the root.


def _format_payload(d: Derivation) -> str:
    from .parsing import format_term

    p = d.payload
    if d.rule == "TheoryAxiom":
        return "{" + p + "}"
    if d.rule == "Substitution":
        return "{" + ", ".join(f"{v} := {format_term(t)}" for v, t in p) + "}"
    if d.rule in ("AndElim", "EqSubst", "OrIntro"):
        return "{" + str(p) + "}"
    if d.rule == "ExistsAdjunction":
        return "{" + p[0] + ": " + " ".join(p[1]) + "}"
    return ""


def format_derivation(d: Derivation) -> str:
    from .parsing import format_sequent

    ids: Dict[int, int] = {}
    lines: List[str] = []

    def emit(node):
        # iterative post-order so deep proofs do not hit the recursion limit
        stack = [(node, False)]
        while stack:
            n, ready = stack.pop()
            if id(n) in ids:
                continue
            if not ready:
                stack.append((n, True))
                for c in reversed(n.children):
                    if id(c) not in ids:
                        stack.append((c, False))
                continue
            k = len(lines) + 1
            ids[id(n)] = k
            prem = ""
            if n.children:
                prem = " <- " + ", ".join(str(ids[id(c)]) for c in n.children)
            lines.append(f"{k}: {n.rule}{_format_payload(n)}{prem} :: {format_sequent(n.conclusion)}")

    emit(d)
    return "\n".join(lines) + "\n"


def parse_derivation(text: str, source: Optional[str] = None, sig=None) -> Derivation:
    import re

    from .parsing import parse_sequent, parse_term

    head_re = re.compile(r"^\s*(\w+)\s*:\s*(\w+)\s*(?:\{([^}]*)\})?\s*(?:<-\s*([\w\s,]+?))?\s*$")
    nodes: Dict[str, Derivation] = {}
    last = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if " :: " not in line:
            raise ParseError("expected ' :: ' before the sequent", lineno, 1, source)
        head, seq_text = line.split(" :: ", 1)
        m = head_re.match(head)
        if not m:
            raise ParseError("malformed step", lineno, 1, source)
        ident, rule, payload_text, prem_text = m.groups()
        if rule not in RULES:
            raise ParseError(f"unknown rule {rule!r}", lineno, raw.find(rule) + 1, source)
        if ident in nodes:
            raise ParseError(f"duplicate step id {ident}", lineno, 1, source)
        col = raw.find(" :: ") + 5
        seq = parse_sequent(seq_text, sig, source, lineno, disjunctive_antecedent=True)
        children = []
        for cid in (prem_text or "").replace(",", " ").split():
            if cid not in nodes:
                raise ParseError(f"premise {cid} is not defined above", lineno, 1, source)
            children.append(nodes[cid])
        payload = None
        pt = (payload_text or "").strip()
        try:
            if rule == "TheoryAxiom":
                payload = pt
            elif rule == "Substitution":
                items = []
                for chunk in _split_top(pt):
                    v, t = chunk.split(":=", 1)
                    items.append((v.strip(), parse_term(t.strip(), sig, seq.ctx)))
                payload = tuple(sorted(items))
            elif rule in ("AndElim", "EqSubst", "OrIntro"):
                payload = int(pt)
            elif rule == "ExistsAdjunction":
                direction, vs = pt.split(":", 1)
                payload = (direction.strip(), tuple(vs.split()))
        except ParseError:
            raise
        except Exception:
            raise ParseError(f"bad payload for {rule}", lineno, col, source) from None
        last = Derivation(rule, seq, tuple(children), payload)
        nodes[ident] = last
    if last is None:
        raise ParseError("empty derivation", 1, 1, source)
    return last


def _split_top(text: str) -> List[str]:
    """Split on commas outside parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur))
    return [c for c in out if c.strip()]
