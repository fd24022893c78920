"""Text front end: formulas, sequents, theory files and structure files.

Grammar (ASCII)::

    formula  := conj ('|' conj)*            -- '|' only at the top of a consequent
    conj     := unit ('&' unit)*
    unit     := 'exists' IDENT+ '.' conj | '(' formula ')' | 'true' | 'false' | atom
    atom     := IDENT '(' terms ')' | term '=' term | IDENT     -- bare IDENT: nullary relation
    term     := IDENT | IDENT '(' terms ')'
    sequent  := formula '|-' ['[' IDENT,* ']'] formula

With an explicit context ``|-[x,y]`` every identifier that is neither in the
context nor bound nor a declared symbol is read as a constant; without one,
such identifiers are variables and the context is their order of appearance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import ParseError
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
    Signature,
    Term,
    Theory,
    Var,
    free_var_list,
    is_atom,
)

_TOKEN = re.compile(
    r"\s*(?:(?P<turn>\|-)|(?P<arrow>->)|(?P<assign>:=)|(?P<ident>[A-Za-z0-9_][A-Za-z0-9_']*)|(?P<punct>[()\[\],.&|=:{};/]))"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, source: Optional[str] = None) -> List[Token]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[col - 1]!r}", line, col, source)
        kind = m.lastgroup
        out.append(Token(kind, m.group(kind), line, m.start(kind) + 1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, sig: Optional[Signature], ctx=None, source=None, line=1):
        self.toks = tokens
        self.i = 0
        self.sig = sig or Signature()
        self.ctx = None if ctx is None else set(ctx)
        self.source = source
        self.line = line

    # token helpers
    def peek(self, k=0) -> Optional[Token]:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else None
            raise ParseError(msg + " (at end of input)", last.line if last else self.line,
                             (last.col + len(last.text)) if last else 1, self.source)
        raise ParseError(msg, tok.line, tok.col, self.source)

    def at(self, text) -> bool:
        t = self.peek()
        return t is not None and t.text == text and t.kind != "ident"

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        tok = self.peek()
        self.i += 1
        return tok

    def ident(self) -> str:
        t = self.peek()
        if t is None or t.kind != "ident":
            self.error("expected an identifier")
        self.i += 1
        return t.text

    def done(self) -> bool:
        return self.i >= len(self.toks)

    # grammar
    def formula(self, bound=frozenset()) -> Formula:
        parts = [self.conj(bound)]
        while self.at("|"):
            self.i += 1
            parts.append(self.conj(bound))
        return parts[0] if len(parts) == 1 else Disj(tuple(parts))

    def conj(self, bound) -> Formula:
        parts = [self.unit(bound)]
        while self.at("&"):
            self.i += 1
            parts.append(self.unit(bound))
        return parts[0] if len(parts) == 1 else Conj(tuple(parts))

    def unit(self, bound) -> Formula:
        t = self.peek()
        if t is None:
            self.error("expected a formula")
        if t.kind == "ident" and t.text == "exists":
            self.i += 1
            names = []
            while self.peek() is not None and self.peek().kind == "ident":
                names.append(self.ident())
            if not names:
                self.error("expected bound variables after 'exists'")
            if len(set(names)) != len(names):
                self.error("duplicate bound variable", t)
            self.expect(".")
            return Exists(tuple(names), self.conj(bound | set(names)))
        if t.kind == "ident" and t.text == "true" and not self._followed_by_eq():
            self.i += 1
            return TOP
        if t.kind == "ident" and t.text == "false" and not self._followed_by_eq():
            self.i += 1
            return Disj(())
        if self.at("("):
            self.i += 1
            f = self.formula(bound)
            self.expect(")")
            return f
        return self.atom(bound)

    def _followed_by_eq(self) -> bool:
        nxt = self.peek(1)
        return nxt is not None and nxt.text == "=" and nxt.kind == "punct"

    def atom(self, bound) -> Formula:
        start = self.peek()
        name = self.ident()
        args = None
        if self.at("("):
            self.i += 1
            args = self.terms(bound)
            self.expect(")")
        if self.at("="):
            self.i += 1
            lhs = self._as_term(name, args, bound)
            rhs = self.term(bound)
            return Eq(lhs, rhs)
        if name in self.sig.funs:
            self.error(f"{name} is a function symbol, not a relation", start)
        if args is None and self.sig.rels.get(name, 0) != 0:
            self.error(f"relation {name} needs arguments", start)
        return Rel(name, tuple(args or ()))

    def terms(self, bound) -> Tuple[Term, ...]:
        if self.at(")"):
            return ()
        out = [self.term(bound)]
        while self.at(","):
            self.i += 1
            out.append(self.term(bound))
        return tuple(out)

    def term(self, bound) -> Term:
        name = self.ident()
        args = None
        if self.at("("):
            self.i += 1
            args = self.terms(bound)
            self.expect(")")
        return self._as_term(name, args, bound)

    def _as_term(self, name, args, bound) -> Term:
        if args is not None:
            return App(name, args)
        if name in bound:
            return Var(name)
        if self.ctx is not None:
            return Var(name) if name in self.ctx else App(name, ())
        if self.sig.funs.get(name) == 0:
            return App(name, ())
        return Var(name)


def _split_turnstile(tokens):
    idx = [k for k, t in enumerate(tokens) if t.kind == "turn"]
    if len(idx) != 1:
        where = tokens[idx[1]] if len(idx) > 1 else (tokens[0] if tokens else None)
        raise ParseError("a sequent needs exactly one '|-'", where.line if where else None,
                         where.col if where else None)
    return idx[0]


def parse_formula(text: str, sig: Optional[Signature] = None, ctx: Optional[Sequence[str]] = None,
                  source: Optional[str] = None, line: int = 1) -> Formula:
    p = _Parser(tokenize(text, line, source), sig, ctx, source, line)
    f = p.formula()
    if not p.done():
        p.error("unexpected trailing input")
    return f


def parse_term(text: str, sig: Optional[Signature] = None, ctx: Optional[Sequence[str]] = None) -> Term:
    p = _Parser(tokenize(text), sig, ctx)
    t = p.term(frozenset())
    if not p.done():
        p.error("unexpected trailing input")
    return t


def parse_sequent(text: str, sig: Optional[Signature] = None, source: Optional[str] = None,
                  line: int = 1, tokens=None, disjunctive_antecedent: bool = False) -> Sequent:
    toks = tokens if tokens is not None else tokenize(text, line, source)
    k = _split_turnstile(toks)
    rest = toks[k + 1 :]
    ctx = None
    if rest and rest[0].text == "[":
        j = 1
        names = []
        while j < len(rest) and rest[j].text != "]":
            if rest[j].kind == "ident":
                names.append(rest[j].text)
            elif rest[j].text != ",":
                raise ParseError("bad context", rest[j].line, rest[j].col, source)
            j += 1
        if j == len(rest):
            raise ParseError("unterminated context", rest[0].line, rest[0].col, source)
        if len(set(names)) != len(names):
            raise ParseError("duplicate variable in context", rest[0].line, rest[0].col, source)
        ctx = tuple(names)
        rest = rest[j + 1 :]
    if not toks[:k]:
        t = toks[k]
        raise ParseError("missing antecedent", t.line, t.col, source)
    p = _Parser(toks[:k], sig, ctx, source, line)
    ante = p.formula()
    if not p.done():
        p.error("unexpected input in antecedent")
    if isinstance(ante, Disj) and not disjunctive_antecedent:
        p.error("disjunction is not allowed in an antecedent", toks[0])
    q = _Parser(rest, sig, ctx, source, line)
    cons = q.formula()
    if not q.done():
        q.error("unexpected trailing input")
    if ctx is None:
        ctx = tuple(dict.fromkeys(free_var_list(ante) + free_var_list(cons)))
    seq = Sequent(ctx, ante, cons)
    try:
        seq.check(None)
    except Exception as exc:
        raise ParseError(str(exc), toks[0].line, toks[0].col, source) from None
    return seq


# -- printing ------------------------------------------------------------------


def format_term(t: Term) -> str:
    if isinstance(t, Var) or not t.args:
        return t.name if isinstance(t, Var) else t.sym
    return f"{t.sym}({','.join(format_term(a) for a in t.args)})"


def format_formula(phi: Formula) -> str:
    if isinstance(phi, Eq):
        return f"{format_term(phi.lhs)} = {format_term(phi.rhs)}"
    if isinstance(phi, Rel):
        if not phi.args:
            return f"{phi.sym}()"
        return f"{phi.sym}({','.join(format_term(a) for a in phi.args)})"
    if isinstance(phi, Conj):
        if not phi.parts:
            return "true"
        return " & ".join(_conj_part(p) for p in phi.parts)
    if isinstance(phi, Exists):
        return f"exists {' '.join(phi.vars)}. {_exists_body(phi.body)}"
    if isinstance(phi, Disj):
        if not phi.parts:
            return "false"
        return " | ".join(f"({format_formula(p)})" if isinstance(p, Disj) else format_formula(p) for p in phi.parts)
    raise TypeError(f"not a formula: {phi!r}")


def _conj_part(p: Formula) -> str:
    if is_atom(p) or p == TOP:
        return format_formula(p)
    return f"({format_formula(p)})"


def _exists_body(p: Formula) -> str:
    if isinstance(p, Disj):
        return f"({format_formula(p)})"
    return format_formula(p)


def format_sequent(s: Sequent) -> str:
    return f"{format_formula(s.ante)} |-[{','.join(s.ctx)}] {format_formula(s.cons)}"


# -- theory files ---------------------------------------------------------------


def _strip_comment(line: str) -> str:
    k = line.find("#")
    return line if k < 0 else line[:k]


def _parse_decls(body: str, lineno: int, source) -> List[Tuple[str, int]]:
    out = []
    for item in body.split(","):
        item = item.strip()
        if not item:
            continue
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_']*)\s*/\s*(\d+)", item)
        if not m:
            raise ParseError(f"bad declaration {item!r} (expected NAME/ARITY)", lineno, 1, source)
        out.append((m.group(1), int(m.group(2))))
    return out


def parse_theory(text: str, source: Optional[str] = None, signature: Optional[Signature] = None) -> Theory:
    funs: Dict[str, int] = dict(signature.funs) if signature else {}
    rels: Dict[str, int] = dict(signature.rels) if signature else {}
    pending = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        if word == "rel":
            for n, a in _parse_decls(rest, lineno, source):
                rels[n] = a
        elif word == "fun":
            for n, a in _parse_decls(rest, lineno, source):
                funs[n] = a
        elif word == "const":
            for n in rest.replace(",", " ").split():
                funs[n] = 0
        elif word == "axiom":
            m = re.fullmatch(r"axiom\s+([A-Za-z0-9_']+)\s*:(.*)", line)
            if not m:
                raise ParseError("expected 'axiom NAME: SEQUENT'", lineno, 1, source)
            col = raw.find(m.group(2)) + 1 if m.group(2) else 1
            pending.append((m.group(1), m.group(2), lineno, col))
        else:
            raise ParseError(f"unknown directive {word!r}", lineno, 1, source)
    overlap = set(funs) & set(rels)
    if overlap:
        raise ParseError(f"symbols declared both as function and relation: {sorted(overlap)}", 1, 1, source)
    sig = Signature(funs, rels)
    axioms: Dict[str, Sequent] = {}
    for name, body, lineno, col in pending:
        if name in axioms:
            raise ParseError(f"duplicate axiom name {name}", lineno, 1, source)
        toks = [Token(t.kind, t.text, t.line, t.col + col - 1) for t in tokenize(body, lineno, source)]
        seq = parse_sequent(body, sig, source, lineno, tokens=toks)
        try:
            seq.check(sig)
        except Exception as exc:
            raise ParseError(str(exc), lineno, col, source) from None
        axioms[name] = seq
    return Theory(sig, axioms)


def format_signature(sig: Signature) -> List[str]:
    lines = []
    for name, ar in sig.rels.items():
        lines.append(f"rel {name}/{ar}")
    for name, ar in sig.funs.items():
        lines.append(f"fun {name}/{ar}")
    return lines


def format_theory(T: Theory) -> str:
    lines = format_signature(T.signature)
    for name, s in T.axioms.items():
        lines.append(f"axiom {name}: {format_sequent(s)}")
    return "\n".join(lines) + "\n"


# -- structure files -------------------------------------------------------------


_TUPLE = re.compile(r"\(([^()]*)\)|([A-Za-z0-9_][A-Za-z0-9_']*)")


def _tuples(body: str, lineno: int, source) -> List[tuple]:
    out = []
    pos = 0
    body = body.strip()
    while pos < len(body):
        if body[pos].isspace():
            pos += 1
            continue
        m = _TUPLE.match(body, pos)
        if not m:
            raise ParseError(f"bad tuple near {body[pos:pos + 10]!r}", lineno, pos + 1, source)
        if m.group(1) is not None:
            inner = [x.strip() for x in m.group(1).split(",")] if m.group(1).strip() else []
            out.append(tuple(inner))
        else:
            out.append((m.group(2),))
        pos = m.end()
    return out


def parse_structure(text: str, signature: Optional[Signature] = None, source: Optional[str] = None):
    """Parse a structure file; undeclared symbols get arities from their tables."""
    from .semantics import Structure

    carrier: List[str] = []
    rel_tabs: Dict[str, List[tuple]] = {}
    fun_tabs: Dict[str, Dict[tuple, str]] = {}
    funs: Dict[str, int] = dict(signature.funs) if signature else {}
    rels: Dict[str, int] = dict(signature.rels) if signature else {}
    have_carrier = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("carrier"):
            _, _, rest = line.partition(":")
            carrier.extend(rest.split())
            have_carrier = True
            continue
        m = re.fullmatch(r"(rel|fun)\s+([A-Za-z_][A-Za-z0-9_']*)\s*(/\s*\d+)?\s*(:(.*))?", line)
        if not m:
            raise ParseError(f"cannot parse line {line!r}", lineno, 1, source)
        kind, name, decl, body = m.group(1), m.group(2), m.group(3), m.group(5)
        if decl:
            (rels if kind == "rel" else funs)[name] = int(decl[1:].strip())
        if body is None:
            continue
        if kind == "rel":
            tabs = _tuples(body, lineno, source)
            rel_tabs.setdefault(name, []).extend(tabs)
            if tabs and name not in rels:
                rels[name] = len(tabs[0])
            if name not in rels:
                raise ParseError(f"arity of {name} unknown (declare it as rel {name}/N)", lineno, 1, source)
        else:
            table = fun_tabs.setdefault(name, {})
            for entry in body.split():
                if "->" not in entry:
                    raise ParseError(f"bad function entry {entry!r}", lineno, 1, source)
                lhs, _, rhs = entry.partition("->")
                if lhs.startswith("("):
                    args = tuple(x.strip() for x in lhs.strip("()").split(",") if x.strip())
                elif lhs:
                    args = (lhs,)
                else:
                    args = ()
                if args in table and table[args] != rhs:
                    raise ParseError(f"{name} defined twice at {args}", lineno, 1, source)
                table[args] = rhs
                funs.setdefault(name, len(args))
    if not have_carrier:
        raise ParseError("missing 'carrier:' line", 1, 1, source)
    sig = Signature(funs, rels)
    try:
        return Structure(sig, tuple(carrier), {k: set(v) for k, v in rel_tabs.items()}, fun_tabs)
    except ValueError as exc:
        raise ParseError(str(exc), None, None, source) from None


def format_structure(A, names: Optional[Mapping[Any, str]] = None, declare: bool = True) -> str:
    from .semantics import element_name, tuple_key

    names = dict(names or {})
    nm = lambda e: names.get(e, element_name(e))  # noqa: E731
    lines = format_signature(A.signature) if declare else []
    lines.append("carrier: " + " ".join(nm(e) for e in A.carrier))
    for sym in A.signature.rels:
        tab = A.sorted_rels[sym]
        if not tab:
            continue
        lines.append(f"rel {sym}: " + " ".join("(" + ",".join(nm(x) for x in t) + ")" for t in tab))
    for sym in A.signature.funs:
        entries = []
        for args in sorted(A.funs[sym], key=tuple_key):
            v = A.funs[sym][args]
            if len(args) == 1:
                lhs = nm(args[0])
            elif not args:
                lhs = ""
            else:
                lhs = "(" + ",".join(nm(x) for x in args) + ")"
            entries.append(f"{lhs}->{nm(v)}")
        lines.append(f"fun {sym}: " + " ".join(entries))
    return "\n".join(lines) + "\n"
