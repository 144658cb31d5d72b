"""Command line entry point: classify, construct, tile, search, render.

Exit status: 0 success (claim holds / code found), 1 claim refuted or search
proved no code exists, 2 bad input, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from typing import Sequence

from . import constructions
from .code_metrics import PERFECT, QUASI_PERFECT, classify
from .io import CodeFile, build_report, format_report, load_code_file, render
from .product_graph import parse_graph_spec
from .search import FOUND, INCONCLUSIVE, NONE, SearchInconclusive, SearchSpec, min_code_size, search_code

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3


class UsageError(ValueError):
    pass


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    # write-then-rename so a failed command never leaves half a file behind
    folder = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".qpcodes-")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, out)


def _load_code(args: argparse.Namespace):
    if not args.code:
        raise UsageError("--code is required")
    cf = load_code_file(args.code)
    graph = parse_graph_spec(args.graph) if args.graph else parse_graph_spec(cf.graph)
    if args.graph and graph != parse_graph_spec(cf.graph):
        raise UsageError(f"--graph {args.graph} does not match the code file's graph {cf.graph}")
    return cf, cf.to_code(graph)


def _claim_from_args(args: argparse.Namespace, fallback=None):
    if args.kind is None and args.e is None:
        return fallback
    if args.kind is None or args.e is None:
        raise UsageError("--kind and --e must be given together")
    return (args.kind, args.e)


def cmd_classify(args: argparse.Namespace) -> int:
    cf, code = _load_code(args)
    claim = _claim_from_args(args, cf.claim)
    start = time.perf_counter()
    report = classify(code)
    out = build_report(code, report, claim, time.perf_counter() - start)
    _write(format_report(out, args.format), args.out)
    if claim is not None and out["verdict"] != "holds":
        return EXIT_REFUTED
    return EXIT_OK


def _parse_params(pairs: Sequence[str]) -> dict[str, str]:
    params: dict[str, str] = {}
    for pair in pairs or ():
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise UsageError(f"--param expects name=value, got {pair!r}")
        params[name.strip()] = value.strip()
    return params


def _construct(tag: str, args: argparse.Namespace) -> int:
    params = _parse_params(args.param)
    if args.k is not None:
        params.setdefault("k", str(args.k))
    code = None
    if args.code:
        code = load_code_file(args.code).to_code()
    start = time.perf_counter()
    result = constructions.construct(tag, params, code)
    report = classify(result.code)
    claim = (result.claim.kind, result.claim.e)
    cf = CodeFile.from_code(result.code, claim, result.provenance)
    out = build_report(result.code, report, claim, time.perf_counter() - start, provenance=result.provenance)
    if args.out:
        _write(cf.dumps(), args.out)
    else:
        out["code_file"] = cf.to_dict()
    sys.stdout.write(format_report(out, args.format))
    return EXIT_OK if out["verdict"] == "holds" else EXIT_REFUTED


def cmd_construct(args: argparse.Namespace) -> int:
    if not args.theorem:
        raise UsageError("--theorem is required")
    return _construct(args.theorem, args)


def cmd_tile(args: argparse.Namespace) -> int:
    return _construct(constructions.TheoremId.N3_4.value, args)


def cmd_search(args: argparse.Namespace) -> int:
    if not args.graph or args.kind is None or args.e is None:
        raise UsageError("search needs --graph, --kind and --e")
    graph = parse_graph_spec(args.graph)
    start = time.perf_counter()
    if args.min_size:
        try:
            size = min_code_size(graph, args.kind, args.e, args.budget, args.symmetry_break, args.workers)
        except SearchInconclusive as exc:
            out = {"graph": graph.spec, "kind": args.kind, "e": args.e, "status": INCONCLUSIVE, "detail": str(exc)}
            _write(format_report(out, args.format), args.out)
            return EXIT_INCONCLUSIVE
        out = {
            "graph": graph.spec,
            "kind": args.kind,
            "e": args.e,
            "status": FOUND if size is not None else NONE,
            "min_size": size,
            "timing_s": round(time.perf_counter() - start, 6),
        }
        _write(format_report(out, args.format), args.out)
        return EXIT_OK if size is not None else EXIT_REFUTED
    spec = SearchSpec(
        graph,
        args.kind,
        args.e,
        size_min=args.size_min,
        size_max=args.size_max,
        exhaustive=args.exhaustive,
        symmetry_break=args.symmetry_break,
        node_budget=args.budget,
        cap=args.cap,
    )
    outcome = search_code(spec, workers=args.workers)
    out = {
        "graph": graph.spec,
        "status": outcome.status,
        "nodes_explored": outcome.nodes_explored,
        "certificate": outcome.certificate,
        "timing_s": round(time.perf_counter() - start, 6),
    }
    if outcome.witness is not None:
        out["witness"] = [list(c) for c in outcome.witness]
        out["report"] = classify(outcome.witness).to_dict()
    _write(format_report(out, args.format), args.out)
    return {FOUND: EXIT_OK, NONE: EXIT_REFUTED, INCONCLUSIVE: EXIT_INCONCLUSIVE}[outcome.status]


def cmd_render(args: argparse.Namespace) -> int:
    _, code = _load_code(args)
    if args.e is None:
        raise UsageError("render needs --e")
    _write(render(code, args.e), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpcodes", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="graph spec, e.g. C3xC6xC2 or P4xP4 or @graph.json")
    common.add_argument("--code", help="code file (JSON)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", help="write the command's output here instead of stdout")
    claim = argparse.ArgumentParser(add_help=False)
    claim.add_argument("--kind", choices=(PERFECT, QUASI_PERFECT))
    claim.add_argument("--e", type=int)
    build = argparse.ArgumentParser(add_help=False)
    build.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    build.add_argument("--k", type=int)

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("classify", parents=[common, claim], help="classify a code, optionally checking a claim")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("construct", parents=[common, build], help="build a code from a named construction")
    p.add_argument("--theorem", help="construction tag, e.g. T3_5")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("tile", parents=[common, build], help="alias for construct --theorem N3_4")
    p.set_defaults(func=cmd_tile)

    p = sub.add_parser("search", parents=[common, claim], help="backtracking search for a code")
    p.add_argument("--size-min", type=int, default=1)
    p.add_argument("--size-max", type=int)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--symmetry-break", action="store_true")
    p.add_argument("--budget", type=int, help="node budget")
    p.add_argument("--cap", type=int, default=SearchSpec.__dataclass_fields__["cap"].default)
    p.add_argument("--min-size", action="store_true", help="report the smallest size admitting a code")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("render", parents=[common], help="draw a code layer by layer")
    p.add_argument("--e", type=int)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
