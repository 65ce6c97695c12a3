"""Command-line interface: ``loopchart <command> ...``.

Exit status 0 means output was produced and every check passed, 1 means a
checked property failed (the counterexample is printed as JSON), and 2 means
a usage, parse, file, cap, or budget error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import bisim, chart, corpus
from .lee import LoopPreconditionError, SearchBudgetExceeded, lee, verify_llee, verify_llee_alt
from .syntax import ParseError, ReservedLiteralError, parse_star_expr, render

OK, FAILED, ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _read_file(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _expr(text: str):
    if text.startswith("@"):
        text = _read_file(text[1:]).strip()
    return parse_star_expr(text)


def _chart_file(path: str) -> chart.Chart:
    if path.startswith("@"):
        path = path[1:]
    return chart.from_json(_read_file(path))


def _chart_or_expr(arg: str, build) -> chart.Chart:
    """`@path` loads chart JSON; anything else is an expression handed to `build`."""
    if arg.startswith("@"):
        return _chart_file(arg)
    return build(parse_star_expr(arg))


def _emit_chart(G: chart.Chart, fmt: str) -> str:
    return chart.to_dot(G) if fmt == "dot" else chart.to_json(G)


# Commands. Each returns (exit status, stdout text).

def cmd_parse(args):
    return OK, render(_expr(args.expr)) + "\n"


GENERATORS = {
    "chart": chart.chart_of,
    "onechart": chart.onechart_of,
    "labeled": chart.labeled_onechart_of,
}


def cmd_generate(args):
    G = GENERATORS[args.command](_expr(args.expr), args.cap)
    return OK, _emit_chart(G, args.format)


def cmd_induce(args):
    G = chart.induce(_chart_or_expr(args.source, lambda e: chart.onechart_of(e, args.cap)))
    if args.gc:
        G = chart.restrict_reachable(G)
    return OK, _emit_chart(G, args.format)


def cmd_lee(args):
    if args.expr is not None:
        G = chart.chart_of(_expr(args.expr), args.cap)
    elif args.file is not None:
        G = _chart_file(args.file)
    else:
        raise UsageError("lee needs a chart file or --expr")
    result = lee(G, budget=args.budget)
    if not result.holds:
        return FAILED, "NO\n"
    return OK, _dump(result.run.to_dict())


def cmd_llee_verify(args):
    H = _chart_file(args.file)
    if H.kind != "labeled":
        raise UsageError("llee-verify needs a chart of kind 'labeled'")
    verdict = verify_llee_alt(H) if args.alt else verify_llee(H)
    return (OK if verdict else FAILED), _dump(verdict.to_dict())


def cmd_bisim(args):
    G1, G2 = _chart_file(args.file1), _chart_file(args.file2)
    rel = bisim.bisimilar(G1, G2)
    if rel is None:
        return FAILED, _dump({"bisimilar": False, "starts": [G1.start, G2.start]})
    return OK, _dump({"pairs": sorted([a, b] for a, b in rel)})


def cmd_collapse(args):
    G = _chart_or_expr(args.source, lambda e: chart.chart_of(e, args.cap))
    Q, m = bisim.collapse(G)
    if args.format == "dot":
        return OK, chart.to_dot(Q)
    return OK, _dump({"chart": chart.to_dict(Q), "map": m})


def cmd_check(args):
    check = bisim.verify_theorem_5_9 if args.command == "thm59" else bisim.verify_theorem_5_14
    e = _expr(args.expr)
    verdict = check(e, args.cap)
    out = dict(verdict.to_dict(), expr=render(e))
    return (OK if verdict else FAILED), _dump(out)


def cmd_corpus(args):
    checks = tuple(c.strip() for c in args.check.split(",") if c.strip())
    unknown = sorted(set(checks) - set(corpus.CHECK_GROUPS))
    if unknown:
        raise UsageError(f"unknown checks: {', '.join(unknown)}")
    try:
        config = corpus.CorpusConfig(seed=args.seed, count=args.count, max_depth=args.max_depth,
                                     alphabet_size=args.alphabet, vertex_cap=args.cap or chart.default_cap())
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = corpus.run_corpus(config, checks)
    return (OK if report.ok else FAILED), _dump(report.to_dict())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loopchart",
                                     description="Process semantics of star expressions, LEE/LLEE and bisimulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_cap(p):
        p.add_argument("--cap", type=int, default=None, help="vertex cap for chart generation")
        return p

    def with_format(p):
        p.add_argument("--format", choices=("json", "dot"), default="json")
        return p

    p = sub.add_parser("parse", help="print the canonical form of an expression")
    p.add_argument("expr")
    p.set_defaults(func=cmd_parse)

    for name in GENERATORS:
        p = with_format(with_cap(sub.add_parser(name, help=f"generate the {name} of an expression")))
        p.add_argument("expr")
        p.set_defaults(func=cmd_generate)

    p = with_format(with_cap(sub.add_parser("induce", help="induced chart of a 1-chart")))
    p.add_argument("source", metavar="FILE_OR_EXPR")
    p.add_argument("--gc", action="store_true", help="drop unreachable vertices")
    p.set_defaults(func=cmd_induce)

    p = with_cap(sub.add_parser("lee", help="search for a successful loop elimination run"))
    p.add_argument("file", nargs="?")
    p.add_argument("--expr")
    p.add_argument("--budget", type=int, default=100_000)
    p.set_defaults(func=cmd_lee)

    p = sub.add_parser("llee-verify", help="check that a labeled chart is an LLEE-witness")
    p.add_argument("file")
    p.add_argument("--alt", action="store_true", help="use the path-condition checker")
    p.set_defaults(func=cmd_llee_verify)

    p = sub.add_parser("bisim", help="largest bisimulation between two charts")
    p.add_argument("file1")
    p.add_argument("file2")
    p.set_defaults(func=cmd_bisim)

    p = with_format(with_cap(sub.add_parser("collapse", help="bisimulation collapse")))
    p.add_argument("source", metavar="FILE_OR_EXPR")
    p.set_defaults(func=cmd_collapse)

    for name in ("thm59", "thm514"):
        p = with_cap(sub.add_parser(name, help="run an end-to-end check on one expression"))
        p.add_argument("expr")
        p.set_defaults(func=cmd_check)

    p = with_cap(sub.add_parser("corpus", help="property checks over a seeded random corpus"))
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--max-depth", type=int, default=5)
    p.add_argument("--alphabet", type=int, default=3)
    p.add_argument("--check", default=",".join(corpus.CHECK_GROUPS),
                   help="comma-separated subset of thm59,thm514,props")
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        status, text = args.func(args)
    except (ParseError, ReservedLiteralError) as exc:
        print(f"loopchart: parse error: {exc}", file=sys.stderr)
        return ERROR
    except SearchBudgetExceeded as exc:
        print("BUDGET")
        print(f"loopchart: {exc}", file=sys.stderr)
        return ERROR
    except (chart.CapExceeded, chart.ChartFormatError, LoopPreconditionError, UsageError, ValueError) as exc:
        print(f"loopchart: {exc}", file=sys.stderr)
        return ERROR
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
