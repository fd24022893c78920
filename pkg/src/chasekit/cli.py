"""Command line front end.

Exit codes: 0 success or provable, 1 refuted or check failed, 2 unknown or
fuel exhausted, 64 usage error, 65 bad input, 70 internal error.
"""

from __future__ import annotations

import argparse
import functools
import json
import sys
from typing import Any, Dict, List, Mapping, Optional

from . import abstraction, chase, normalize, parsing, proofs, semantics
from .errors import (
    ChasekitError,
    CheckFailed,
    NotSatisfiedAtAnyLevel,
    ParseError,
    TraceExhausted,
)
from .syntax import Sequent, Theory, free_var_list

EXIT_OK, EXIT_NO, EXIT_UNKNOWN = 0, 1, 2
EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 64, 65, 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _csv(text: str) -> List[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _pairs(text: str) -> List[tuple]:
    out = []
    for part in _csv(text):
        v, sep, a = part.partition("=")
        if not sep or not v.strip() or not a.strip():
            raise argparse.ArgumentTypeError(f"expected x=a, got {part!r}")
        out.append((v.strip(), a.strip()))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chasekit", description="Chase, conservativity witnesses and constant abstraction.")
    p.add_argument("--json", action="store_true", help="emit a JSON report instead of text")
    p.add_argument("-o", "--output", default=None, help="write the report to this path instead of stdout")
    common = _Parser(add_help=False)
    common.add_argument("--jobs", type=_positive, default=1,
                        help="worker threads (used by the chase; accepted everywhere for uniform scripting)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser = functools.partial(sub.add_parser, parents=[common])

    s = sub.add_parser("normalize", help="put every axiom in normal form")
    s.add_argument("theory")
    s = sub.add_parser("elim-fn", help="replace function symbols by graph relations")
    s.add_argument("theory")
    s = sub.add_parser("elim-eq", help="replace equality by a congruence predicate")
    s.add_argument("theory")
    s = sub.add_parser("eval", help="evaluate a formula in a structure")
    s.add_argument("structure")
    s.add_argument("formula")
    s.add_argument("--assign", type=_pairs, default=None, help="x=a,y=b assignment")
    s.add_argument("--at", type=_csv, default=[], help="elements for the free variables")
    s.add_argument("--vars", type=_csv, default=None, help="variable order (default: order of appearance)")
    s = sub.add_parser("diagram", help="print the diagram theory of a structure")
    s.add_argument("structure")
    s = sub.add_parser("chase", help="chase a structure")
    s.add_argument("theory")
    s.add_argument("structure")
    _chase_flags(s)
    s.add_argument("--trace", action="store_true", help="print the level-by-level trace")
    s = sub.add_parser("entails", help="decide a sequent by chasing its antecedent")
    s.add_argument("theory")
    s.add_argument("sequent")
    _chase_flags(s)
    s = sub.add_parser("witness", help="conservativity witness for a formula at a tuple")
    s.add_argument("theory")
    s.add_argument("structure")
    s.add_argument("formula")
    s.add_argument("--at", type=_csv, default=[])
    s.add_argument("--vars", type=_csv, default=None)
    _chase_flags(s)
    s = sub.add_parser("check", help="check a derivation file")
    s.add_argument("theory")
    s.add_argument("derivation")
    s = sub.add_parser("abstract", help="abstract constants in a derivation")
    s.add_argument("theory")
    s.add_argument("derivation")
    s.add_argument("--constants", type=_csv, required=True)
    s = sub.add_parser("elim-diagram", help="eliminate diagram constants from a derivation")
    s.add_argument("theory")
    s.add_argument("structure")
    s.add_argument("derivation")
    return p


def _chase_flags(s) -> None:
    s.add_argument("--fuel", type=_nonneg, default=10)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--faithful", action="store_true", help="re-fire every instance at every level")
    g.add_argument("--mode", choices=chase.MODES, default=None)


def _mode(args) -> Optional[str]:
    return "faithful" if args.faithful else args.mode


# -- io --------------------------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _theory(path: str) -> Theory:
    return parsing.parse_theory(_read(path), source=path)


def _structure(path: str, sig=None):
    return parsing.parse_structure(_read(path), signature=sig, source=path)


def element_labels(carrier, base=()) -> Dict[Any, str]:
    """Printable names: strings stay, chase elements become ``n1, n2, ...``."""
    taken = {e for e in carrier if isinstance(e, str)} | set(base)
    out, k = {}, 0
    for e in carrier:
        if isinstance(e, str):
            out[e] = e
            continue
        k += 1
        while f"n{k}" in taken:
            k += 1
        out[e] = f"n{k}"
    return out


def _structure_json(A, names) -> Dict[str, Any]:
    nm = lambda e: names.get(e, semantics.element_name(e))  # noqa: E731
    return {
        "carrier": [nm(e) for e in A.carrier],
        "rels": {s: [[nm(x) for x in t] for t in A.sorted_rels[s]] for s in A.signature.rels},
        "funs": {
            s: [[[nm(x) for x in a], nm(v)] for a, v in sorted(A.funs[s].items(), key=lambda kv: semantics.tuple_key(kv[0]))]
            for s in A.signature.funs
        },
    }


def _describe(e, names) -> str:
    if isinstance(e, chase.New):
        args = ",".join(names.get(a, str(a)) for a in e.args)
        return f"{e.axiom}({args}).{e.index} level {e.level}"
    return str(e)


# -- commands ---------------------------------------------------------------------------------


def cmd_normalize(args):
    T = normalize.normalize_theory(_theory(args.theory))
    text = parsing.format_theory(T)
    return EXIT_OK, text, {"theory": text}


def cmd_elim_fn(args):
    _, T = normalize.eliminate_functions(_theory(args.theory))
    text = parsing.format_theory(T)
    return EXIT_OK, text, {"theory": text}


def cmd_elim_eq(args):
    T = normalize.normalize_theory(_theory(args.theory))
    if T.has_equality:
        T = normalize.normalize_theory(normalize.eliminate_equality(T, normalize.equality_symbol(T.signature)))
    text = parsing.format_theory(T)
    return EXIT_OK, text, {"theory": text}


def _assignment(A, phi, vars_, at):
    ctx = tuple(vars_) if vars_ is not None else free_var_list(phi)
    if len(ctx) != len(at):
        raise UsageError(f"--at gives {len(at)} elements for {len(ctx)} variables {list(ctx)}")
    names = {semantics.element_name(e): e for e in A.carrier}
    env = {}
    for v, a in zip(ctx, at):
        if a not in names:
            raise UsageError(f"no element named {a!r}")
        env[v] = names[a]
    return ctx, env


def cmd_eval(args):
    if args.assign is not None:
        if args.at or args.vars is not None:
            raise UsageError("--assign cannot be combined with --at or --vars")
        args.vars = [v for v, _ in args.assign]
        args.at = [a for _, a in args.assign]
    A = _structure(args.structure)
    phi = parsing.parse_formula(args.formula, A.signature, args.vars)
    A.signature.check_formula(phi, None)
    ctx, env = _assignment(A, phi, args.vars, args.at)
    hit = semantics.satisfy(A, phi, env)
    if hit is None:
        return EXIT_NO, "FALSE\n", {"value": False}
    lines = ["TRUE"]
    wit = {k: semantics.element_name(v) for k, v in sorted(hit.items())}
    if wit:
        lines.append("# witness: " + ", ".join(f"{k} := {v}" for k, v in wit.items()))
    return EXIT_OK, "\n".join(lines) + "\n", {"value": True, "witness": wit}


def cmd_diagram(args):
    A = _structure(args.structure)
    D = semantics.diagram(A)
    text = parsing.format_theory(D.theory)
    return EXIT_OK, text, {"theory": text, "constants": {semantics.element_name(e): c for e, c in D.constant_of.items()}}


def cmd_chase(args):
    T = _theory(args.theory)
    A = _structure(args.structure, T.signature)
    gc = chase.chase_general(T, A, args.fuel, _mode(args), args.jobs)
    tr = gc.trace
    level = len(tr.levels) - 1
    status = "SATURATED" if gc.saturated else "FUEL-EXHAUSTED"
    lines = [f"{status} level={level}"]
    report: Dict[str, Any] = {"status": status.lower(), "level": level}
    all_elems = tr.final.carrier
    labels = element_labels(all_elems)
    if args.trace:
        trace_json = []
        for k, firings in enumerate(tr.firings, 1):
            lines.append(f"# level {k}: {len(firings)} firings, {tr.levels[k].size} elements, {tr.levels[k].fact_count()} facts")
            entries = []
            for f in firings:
                fargs = ",".join(labels[a] for a in f.args)
                wit = " ".join(labels[w] for w in f.witnesses)
                lines.append(f"#   {f.axiom}({fargs})" + (f" -> {wit}" if wit else ""))
                entries.append({"axiom": f.axiom, "args": [labels[a] for a in f.args], "new": [labels[w] for w in f.witnesses]})
            trace_json.append(entries)
        report["trace"] = trace_json
    if gc.model is not None:
        mlabels = element_labels(gc.model.carrier)
        mlabels.update({e: labels[e] for e in gc.model.carrier if e in labels})
        lines.append(parsing.format_structure(gc.model, mlabels).rstrip("\n"))
        report["structure"] = _structure_json(gc.model, mlabels)
        report["eta"] = {semantics.element_name(a): mlabels[gc.eta(a)] for a in A.carrier}
    code = EXIT_OK if gc.saturated else EXIT_UNKNOWN
    return code, "\n".join(lines) + "\n", report


def cmd_entails(args):
    T = _theory(args.theory)
    sigma = parsing.parse_sequent(args.sequent, T.signature, source="<sequent>")
    res = chase.entails(T, sigma, args.fuel, _mode(args), args.jobs)
    if res.verdict == "provable":
        lines = [f"PROVABLE disjunct={res.disjunct}"]
        report: Dict[str, Any] = {"verdict": "provable", "disjunct": res.disjunct}
        if res.witness is not None:
            psi = parsing.format_formula(res.witness.psi)
            lines.append(f"# witness: {psi}")
            report["witness"] = psi
        if res.proof is not None:
            text = proofs.format_derivation(res.proof)
            lines.append(text.rstrip("\n"))
            report["derivation"] = text
        return EXIT_OK, "\n".join(lines) + "\n", report
    if res.verdict == "refuted":
        M = res.countermodel
        labels = element_labels(M.carrier)
        at = ", ".join(f"{v} := {labels[e]}" for v, e in res.assignment.items())
        lines = ["REFUTED", f"# at: {at}", parsing.format_structure(M, labels).rstrip("\n")]
        report = {
            "verdict": "refuted",
            "at": {v: labels[e] for v, e in res.assignment.items()},
            "countermodel": _structure_json(M, labels),
        }
        return EXIT_NO, "\n".join(lines) + "\n", report
    return EXIT_UNKNOWN, "UNKNOWN\n", {"verdict": "unknown"}


def cmd_witness(args):
    T = _theory(args.theory)
    A = _structure(args.structure, T.signature)
    sig = T.signature.extend(funs=A.signature.funs, rels=A.signature.rels)
    phi = parsing.parse_formula(args.formula, sig, args.vars)
    ctx, env = _assignment(A, phi, args.vars, args.at)
    gc = chase.chase_general(T, A, args.fuel, _mode(args), args.jobs)
    try:
        w = gc.witness(phi, ctx, tuple(env[v] for v in ctx))
    except NotSatisfiedAtAnyLevel as exc:
        return EXIT_NO, f"NOT-SATISFIED\n# {exc}\n", {"status": "not-satisfied"}
    except TraceExhausted as exc:
        return EXIT_UNKNOWN, f"TRACE-EXHAUSTED\n# {exc}\n", {"status": "trace-exhausted"}
    psi = parsing.format_formula(w.psi)
    text = proofs.format_derivation(w.proof)
    out = f"WITNESS level={w.level}\n# psi: {psi}\n{text}"
    return EXIT_OK, out, {"status": "witness", "level": w.level, "psi": psi, "derivation": text}


def _derivation(path: str):
    return proofs.parse_derivation(_read(path), source=path)


def cmd_check(args):
    T = _theory(args.theory)
    d = _derivation(args.derivation)
    res = proofs.check_derivation(d, T)
    if res:
        return EXIT_OK, "OK\n", {"ok": True}
    return EXIT_NO, f"{res}\n", {"ok": False, "path": res.where, "rule": res.rule, "message": res.message}


def cmd_abstract(args):
    T = _theory(args.theory)
    d = _derivation(args.derivation)
    res = proofs.check_derivation(d, T)
    if not res:
        return EXIT_NO, f"{res}\n", {"ok": False, "path": res.where, "message": res.message}
    ab = abstraction.abstract_constants(d, args.constants, T, check=False)
    f = ", ".join(f"{v} := {ab.assignment[v].sym}" for v in ab.fresh_context)
    text = proofs.format_derivation(ab.derivation)
    out = f"ABSTRACTED\n# f: {f}\n{text}"
    return EXIT_OK, out, {"fresh": list(ab.fresh_context), "f": {v: ab.assignment[v].sym for v in ab.fresh_context}, "derivation": text}


def cmd_elim_diagram(args):
    T = _theory(args.theory)
    A = _structure(args.structure, T.signature)
    d = _derivation(args.derivation)
    try:
        r = abstraction.eliminate_diagram_constants(d, A, T)
    except CheckFailed as exc:
        return EXIT_NO, f"FAIL {exc}\n", {"ok": False, "message": str(exc)}
    chi = parsing.format_formula(r.chi)
    at = ", ".join(f"{v} := {semantics.element_name(e)}" for v, e in r.assignment.items())
    text = proofs.format_derivation(r.proof)
    out = f"ELIMINATED\n# chi: {chi}\n# at: {at}\n{text}"
    return EXIT_OK, out, {"chi": chi, "at": {v: semantics.element_name(e) for v, e in r.assignment.items()}, "derivation": text}


COMMANDS = {
    "normalize": cmd_normalize,
    "elim-fn": cmd_elim_fn,
    "elim-eq": cmd_elim_eq,
    "eval": cmd_eval,
    "diagram": cmd_diagram,
    "chase": cmd_chase,
    "entails": cmd_entails,
    "witness": cmd_witness,
    "check": cmd_check,
    "abstract": cmd_abstract,
    "elim-diagram": cmd_elim_diagram,
}


def run(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    try:
        code, text, report = COMMANDS[args.command](args)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_DATA
    except ChasekitError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_DATA
    except Exception as exc:  # invariant violations
        err.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    if args.json:
        report = dict(report)
        report["exit"] = code
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.output is None:
        out.write(text)
        return code
    try:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        err.write(f"usage error: cannot write {args.output}: {exc.strerror}\n")
        return EXIT_USAGE
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
