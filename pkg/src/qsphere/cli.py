"""Command line interface: ``qsphere <command> [flags]``.

Exit codes: 0 on success, 1 when a verification suite fails, 2 on usage
errors (unknown command or flag, malformed expression, index out of range).
Output is deterministic; ``--format records`` prints one JSON object per
line with keys in a fixed order.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .algebra import DegreeExceeded, graded_dimension
from .classify import IncompleteBasis, classify
from .first_order import classical_limit_table, limit_str
from .higher_order import graded_wedge_dimension
from .parser import (ExpressionError, IndexOutOfRange, ParseError, Evaluator, Parser, parse,
                     to_text, wedge)
from .scalars import Scalar, format_scalar
from .suites import SUITES, SuiteReport, run_suite
from .tensors import InvalidDimension, build_structure_tensor, spectral_projectors

TENSOR_KINDS = ("C", "I", "K", "Rhat", "RhatInv", "P+", "P-", "P0")


class UsageError(ValueError):
    pass


def parse_scalar(text: str) -> Scalar:
    value = Parser(text, Evaluator(3)).parse()
    if value.rank or set(value.terms) - {()}:
        raise UsageError(f"{text!r} is not a scalar")
    return value.terms.get((), Scalar(0))


def _sign(text: Optional[str]) -> Optional[int]:
    return None if text is None else (1 if text == "plus" else -1)


def _emit(args, text: str, record) -> None:
    if args.format == "records":
        records = record if isinstance(record, list) else [record]
        for r in records:
            print(json.dumps(r))
    else:
        print(text)


# ---- commands --------------------------------------------------------------------

def cmd_tensor(args) -> int:
    N = args.N
    if args.kind in ("P+", "P-", "P0"):
        T = spectral_projectors(N)[args.kind]
    else:
        T = build_structure_tensor(args.kind, N)
    if args.kind == "C":
        items = sorted(T.items())
        records = [{"indices": list(k), "coefficient": format_scalar(v)} for k, v in items]
    else:
        records = [{"indices": r["indices"], "coefficient": r["coefficient"]} for r in T.records()]
    text = "\n".join(f"{' '.join(map(str, r['indices']))}  {r['coefficient']}" for r in records)
    _emit(args, text, records)
    return 0


def _expression(args, text: str):
    return parse(text, args.N, args.sign or "plus", args.max_degree)


def cmd_reduce(args) -> int:
    value = _expression(args, args.expression)
    out = to_text(value)
    _emit(args, out, {"input": args.expression, "n": args.N, "normal_form": out})
    return 0


def cmd_wedge_normal(args) -> int:
    value = wedge(_expression(args, args.expression), args.N)
    out = to_text(value)
    _emit(args, out, {"input": args.expression, "n": args.N, "normal_form": out})
    return 0


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    alpha = parse_scalar(args.alpha) if args.alpha else None
    reports: List[SuiteReport] = [run_suite(n, args.N, sign=_sign(args.sign), alpha=alpha) for n in names]
    ok = all(r.passed for r in reports)
    if args.format == "records":
        for r in reports:
            for rec in r.records():
                print(json.dumps(rec))
    else:
        for r in reports:
            print(r.text())
            if args.timing:
                print(f"  wall time {r.wall_time:.2f} s")
        if len(reports) > 1:
            print("all suites pass" if ok else "some suites FAILED")
    return 0 if ok else 1


def cmd_classify(args) -> int:
    res = classify(args.constraint, args.N)
    lines = [f"classify {res.constraint} N={res.n}"
             + ("" if res.complete else " (no completeness claim for N < 6)")]
    sols = [[format_scalar(c) for c in s] for s in res.solutions]
    if res.solvable:
        for k, s in enumerate(sols, 1):
            lines.append(f"solution {k}: " + ", ".join(f"a{m} = {v}" for m, v in enumerate(s, 1)))
    else:
        lines.append("no solution")
        for w in res.witness:
            lines.append(f"witness: {w}")
    for name, p in res.eliminated.items():
        lines.append(f"eliminated {name} = {p}")
    for note in res.notes:
        lines.append(f"note: {note}")
    record = {"constraint": res.constraint, "n": res.n, "complete": res.complete,
              "solvable": res.solvable, "solutions": sols,
              "witness": [str(w) for w in res.witness], "notes": res.notes}
    _emit(args, "\n".join(lines), record)
    return 0


def cmd_limit(args) -> int:
    signs = [1, -1] if args.sign is None else [_sign(args.sign)]
    texts, records = [], []
    for e in signs:
        table = classical_limit_table(e, args.N)
        name = "plus" if e == 1 else "minus"
        texts.append(f"{name} N={args.N}: {limit_str(table)}")
        texts.append(f"{name} N={args.N}: theta x_i - x_i theta = {table['theta_commutator']} dx_i")
        texts.append(f"{name} N={args.N}: {'noncommutative' if table['noncommutative'] else 'commutative'}")
        records.append({"sign": name, "n": args.N,
                        "terms": {k: str(v) for k, v in table["terms"].items()},
                        "theta_commutator": str(table["theta_commutator"]),
                        "noncommutative": table["noncommutative"]})
    _emit(args, "\n".join(texts), records)
    return 0


def cmd_dim(args) -> int:
    if args.wedge is not None:
        kind, k = "wedge", args.wedge
        d = graded_wedge_dimension(k, args.N)
    else:
        kind, k = "algebra", args.algebra
        d = graded_dimension(k, args.N)
    _emit(args, str(d), {"kind": kind, "grade": k, "n": args.N, "dimension": d})
    return 0


# ---- argument parsing ------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--N", type=int, default=3, help="number of generators (>= 3)")
    p.add_argument("--sign", choices=("plus", "minus"), help="calculus sign")
    p.add_argument("--alpha", help="braiding parameter (scalar syntax, default q)")
    p.add_argument("--max-degree", type=int, default=4, help="degree bound for expressions")
    p.add_argument("--format", choices=("text", "records"), default="text")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="qsphere", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tensor", parents=[common], help="print a structure tensor")
    p.add_argument("kind", choices=TENSOR_KINDS)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("reduce", parents=[common], help="normal form of an expression")
    p.add_argument("expression")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("suite", choices=tuple(SUITES) + ("all",))
    p.add_argument("--timing", action="store_true", help="also print wall time (text format only)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", parents=[common], help="solve for the bimodule coefficients")
    p.add_argument("--constraint", choices=("free", "theta-zero"), default="free")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("limit", parents=[common], help="bimodule rules at q = 1")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("wedge-normal", parents=[common], help="normal form of a wedge expression")
    p.add_argument("expression")
    p.set_defaults(func=cmd_wedge_normal)

    p = sub.add_parser("dim", parents=[common], help="graded dimensions")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--wedge", type=int, metavar="S", help="wedge forms of grade S")
    g.add_argument("--algebra", type=int, metavar="K", help="algebra elements of degree K")
    p.set_defaults(func=cmd_dim)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, IndexOutOfRange, ExpressionError, UsageError, InvalidDimension,
            DegreeExceeded, IncompleteBasis, ZeroDivisionError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
