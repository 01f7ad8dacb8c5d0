"""Command line: ``idemval query`` and ``idemval report``.

Exit codes: 0 ok, 1 contradiction, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .algebra import CapacityError, ContractError
from .engine import QueryError
from .kb import KBError, Query, parse_kb, run_query, serialize_result, trace_lines

EXIT_OK, EXIT_CONTRADICTION, EXIT_INPUT = 0, 1, 2


def _order_option(text: str | None) -> tuple[str, tuple]:
    if text is None:
        return "min-degree", ()
    if text.startswith("given:"):
        return "given", tuple(v for v in text[len("given:"):].split(",") if v)
    return text, ()


def _queries(kb, args) -> list[Query]:
    if args.target:
        heuristic, given = _order_option(args.order)
        return [Query(args.target, args.rep or "auto", heuristic, given)]
    if not kb.queries:
        raise QueryError("no --target given and the knowledge base has no query statements")
    out = []
    for q in kb.queries:
        heuristic, given = (q.heuristic, q.given) if args.order is None else _order_option(args.order)
        out.append(Query(q.target, args.rep or q.rep, heuristic, given))
    return out


def _load(path: str):
    return parse_kb(Path(path).read_text(encoding="utf-8"))


def cmd_query(args) -> int:
    kb = _load(args.kb)
    queries = _queries(kb, args)
    code = EXIT_OK
    for q in queries:
        result = run_query(kb, q.target, q.rep, q.heuristic, q.given)
        if len(queries) > 1:
            sys.stdout.write(f"# {q.text()}\n")
        sys.stdout.write(serialize_result(result, args.emit))
        if args.trace:
            for line in trace_lines(result):
                sys.stderr.write(line + "\n")
        if result.status == "contradiction":
            code = EXIT_CONTRADICTION
    return code


def cmd_report(args) -> int:
    from .report import write_report

    kb = _load(args.kb)
    code = EXIT_OK
    out = Path(args.out)
    for q in _queries(kb, args):
        result = run_query(kb, q.target, q.rep, q.heuristic, q.given)
        paths = write_report(result, out)
        for p in paths:
            print(p)
        if result.status == "contradiction":
            code = EXIT_CONTRADICTION
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idemval",
        description="Marginal queries over idempotent valuations (finite frames or polytopes).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--kb", required=True, help="knowledge-base file")
        p.add_argument("--target", help="query variable (default: the file's query lines)")
        p.add_argument("--rep", choices=["lower", "upper", "auto"], default=None,
                       help="representation used for the computation")
        p.add_argument("--order", default=None,
                       help="min-degree, min-fill or given:v1,v2,...")

    q = sub.add_parser("query", help="answer a marginal query")
    common(q)
    q.add_argument("--trace", action="store_true", help="deletion trace on stderr")
    q.add_argument("--emit", choices=["basic", "explicit"], default="basic")
    q.set_defaults(func=cmd_query)

    r = sub.add_parser("report", help="write trace CSV, answer text and a trace figure")
    common(r)
    r.add_argument("--out", default="report", help="output directory")
    r.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KBError as e:
        for n, msg in e.diagnostics:
            sys.stderr.write(f"{args.kb}:{n}: {msg}\n")
        return EXIT_INPUT
    except (QueryError, ContractError, CapacityError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
