"""Command-line front end.

Commands: ``extension`` (compute and emit the fixpoint), ``query`` (ask for
one literal/obligation/conjunction), ``check`` (validate a derivation file),
``reduct`` (print a reduct, for debugging), ``gen`` (emit a generated theory)
and ``bench`` (timing table for generated families).

Exit codes: 0 success, 1 rejected derivation, 2 parse or usage errors,
3 validation warnings escalated by --strict, 4 dependency-cycle diagnostic.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from math import log
from typing import Optional

from . import generators
from .dsl import emit_extension, load_theory, parse_theory, serialize_theory
from .engine import DependencyCycleError, Session
from .model import Conjunction, Literal, Theory, lit
from .proofs import (DerivationSyntaxError, TaggedExpression, check_derivation,
                     format_derivation, parse_derivation, witness_derivation)

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_PARSE = 2
EXIT_STRICT = 3
EXIT_CYCLE = 4


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _CliError(EXIT_PARSE, f"cannot read {path}: {exc}")


def _load(path: str, strict: bool) -> Theory:
    result = parse_theory(_read(path))
    for d in result.diagnostics:
        print(f"{path}:{d}", file=sys.stderr)
    if result.theory is None:
        raise _CliError(EXIT_PARSE, f"{path}: theory does not parse")
    if strict and result.warnings():
        raise _CliError(EXIT_STRICT, f"{path}: warnings escalated by --strict")
    return result.theory


def _parse_goal(text: str) -> tuple[str, object]:
    """Parse ``d a``, ``O a`` or ``O a & b`` into (kind, target)."""
    parts = text.strip().split(None, 1)
    if len(parts) != 2 or parts[0] not in ("d", "O"):
        raise _CliError(EXIT_PARSE, f"malformed goal {text!r}; use 'd a', 'O a' "
                                    f"or 'O a & b'")
    mode, rest = parts
    try:
        if "&" in rest:
            if mode != "O":
                raise ValueError("conjunction goals use the O prefix")
            target: object = Conjunction.of(p.strip() for p in rest.split("&"))
            return "conj", target
        target = lit(rest)
    except Exception as exc:
        raise _CliError(EXIT_PARSE, f"malformed goal {text!r}: {exc}")
    return ("obligation" if mode == "O" else "factual"), target


def cmd_extension(args) -> int:
    theory = _load(args.theory, args.strict)
    session = Session(theory)
    ext = session.extension
    extras_pos, extras_neg = [], []
    for text in args.conj or ():
        kind, target = _parse_goal(f"O {text}" if not text.startswith("O") else text)
        if kind != "conj":
            raise _CliError(EXIT_PARSE, f"--conj expects a conjunction, got {text!r}")
        verdict = session.evaluate_conjunction(target)
        if verdict.proven:
            extras_pos.append(target)
        elif verdict.refuted:
            extras_neg.append(target)
    if extras_pos or extras_neg:
        from .engine import Extension
        ext = Extension(ext.factual_pos, ext.factual_neg, ext.obligation_pos,
                        ext.obligation_neg, ext.conj_pos | frozenset(extras_pos),
                        ext.conj_neg | frozenset(extras_neg))
    if args.trace:
        print(session.trace.render(), file=sys.stderr, end="")
    sys.stdout.write(emit_extension(ext, args.format))
    return EXIT_OK


def cmd_query(args) -> int:
    theory = _load(args.theory, args.strict)
    kind, target = _parse_goal(args.goal)
    session = Session(theory)
    positive = session.query(kind, True, target)
    negative = session.query(kind, False, target)
    if args.neg:
        print("refuted" if negative else "not refuted")
        return EXIT_OK
    if positive:
        status = "proven"
    elif negative:
        status = "refuted"
        if kind != "conj" and target not in session.universe.literals:
            status = "refuted (no rules)"
    else:
        status = "undecided"
    print(status)
    if args.witness and positive:
        goal = TaggedExpression(True, kind != "factual", target)
        steps = witness_derivation(theory, session.trace, goal, session=session)
        sys.stdout.write(format_derivation(steps))
    return EXIT_OK


def cmd_check(args) -> int:
    theory = _load(args.theory, args.strict)
    try:
        steps = parse_derivation(_read(args.derivation))
    except DerivationSyntaxError as exc:
        raise _CliError(EXIT_PARSE, f"{args.derivation}: {exc}")
    report = check_derivation(theory, steps)
    sys.stdout.write(report.render())
    return EXIT_OK if report.accepted else EXIT_REJECTED


def cmd_reduct(args) -> int:
    from .reduct import reduct

    theory = _load(args.theory, args.strict)
    try:
        removed = frozenset(lit(t) for t in args.literal)
    except Exception as exc:
        raise _CliError(EXIT_PARSE, f"bad literal list: {exc}")
    sys.stdout.write(serialize_theory(reduct(theory, removed)))
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = generators.FamilySpec(args.family, n=args.n, r=args.r, m=args.m,
                                 k=args.k, seed=args.seed)
    theory = generators.generate(spec)
    text = serialize_theory(theory)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _median_runtime_ms(theory: Theory, reps: int) -> float:
    times = []
    for _ in range(max(reps, 1)):
        start = time.perf_counter()
        Session(theory).extension
        times.append((time.perf_counter() - start) * 1000.0)
    return statistics.median(times)


def fit_loglog_slope(sizes: list[int], times_ms: list[float]) -> float:
    """Least-squares slope of log(time) against log(size)."""
    xs = [log(s) for s in sizes]
    ys = [log(max(t, 1e-6)) for t in times_ms]
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    return num / den if den else 0.0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    print("family,n,r,m,k,median_ms")
    medians = []
    for size in sizes:
        theory = generators.chain_ctd(size)
        ms = _median_runtime_ms(theory, args.reps)
        medians.append(ms)
        print(f"chain-ctd,{size},{size},0,0,{ms:.3f}")
    slope = fit_loglog_slope(sizes, medians)
    print(f"# fitted log-log slope: {slope:.3f}")
    if args.conj:
        m, k = (int(x) for x in args.conj.split(","))
        base = sizes[-1]
        plain_ms = medians[-1]
        overlay = generators.conj_grid(m, k, base_rules=base)
        conj_ms = _median_runtime_ms(overlay, args.reps)
        rules = len(overlay.rules)
        print(f"conj-grid,{base},{rules},{m},{k},{conj_ms:.3f}")
        print(f"# conjunction overhead factor: {conj_ms / max(plain_ms, 1e-9):.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dedlog",
        description="Defeasible deontic logic engine: extensions, queries, "
                    "derivation checking, reducts, generators and benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extension", help="compute and emit a theory's extension")
    p.add_argument("theory")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--trace", action="store_true",
                   help="dump the stage trace to stderr")
    p.add_argument("--conj", action="append", metavar="TARGET",
                   help="also evaluate an ad-hoc conjunction (e.g. 'c & d') "
                        "and include its verdict in the output")
    p.set_defaults(func=cmd_extension)

    p = sub.add_parser("query", help="ask about one literal, obligation or conjunction")
    p.add_argument("theory")
    p.add_argument("goal", help="'d a', 'O a' or 'O a & b'")
    p.add_argument("--neg", action="store_true",
                   help="query the refutation side of the goal")
    p.add_argument("--witness", action="store_true",
                   help="print an accepted derivation for a proven goal")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("check", help="validate a derivation file step by step")
    p.add_argument("theory")
    p.add_argument("derivation")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduct", help="print the reduct for a literal set")
    p.add_argument("theory")
    p.add_argument("literal", nargs="+", help="plain literals, e.g. ~a b")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_reduct)

    p = sub.add_parser("gen", help="emit a generated theory")
    p.add_argument("family", choices=generators.FAMILIES)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time extension computation over families")
    p.add_argument("--sizes", default="100,200,400,800")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--conj", metavar="M,K",
                   help="also time a conjunction overlay, e.g. 4,4")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DependencyCycleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CYCLE


if __name__ == "__main__":
    sys.exit(main())
