"""Command-line interface: ``tsupport encode|validate|support|classic``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .catalog import encode
from .errors import TemporalSupportError
from .report import decimal4
from .timecore import Granularity, format_time
from .workspace import (SCHEMAS_FILE, classic_support, load_workspace, parse_now,
                        parse_points, parse_schemas, render_eco, run_query)

WORKSPACE_ENV = "TSUPPORT_WORKSPACE"


def _add_workspace_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-w", "--workspace", default=os.environ.get(WORKSPACE_ENV),
                   help=f"workspace directory (default: ${WORKSPACE_ENV})")
    p.add_argument("--granularity", default="minute", type=Granularity.parse,
                   help="time quantum, e.g. 'minute' or '15 minute' (default: minute)")
    p.add_argument("--now", help="resolve Now to this MM/DD/YYYY HH:MM instant "
                                 "(default: latest transaction time)")


def _add_query_args(p: argparse.ArgumentParser) -> None:
    _add_workspace_args(p)
    p.add_argument("query", help="sequential or regular expression over constraints")
    p.add_argument("--kind", choices=("auto", "se", "re"), default="auto")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsupport",
        description="Temporal support of constraint patterns over evolving items.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode point-based occurrences into ECOs")
    _add_workspace_args(p)
    p.add_argument("category", help="category whose <category>.points file is encoded")
    p.add_argument("-o", "--output", type=Path, help="write ECO lines here (default: stdout)")

    p = sub.add_parser("validate", help="load a workspace and check its integrity")
    _add_workspace_args(p)

    p = sub.add_parser("support", help="temporal support of a query")
    _add_query_args(p)
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against the brute-force oracle")
    p.add_argument("--explain", action="store_true",
                   help="show witnessing tuples and ECO lists per object")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("classic", help="classic support (matching objects / all objects)")
    _add_query_args(p)
    return parser


def _workspace_dir(args) -> Path:
    if not args.workspace:
        raise TemporalSupportError(f"no workspace given (use -w or set ${WORKSPACE_ENV})")
    return Path(args.workspace)


def _load(args):
    return load_workspace(_workspace_dir(args), granularity=args.granularity,
                          now=parse_now(args.now))


def cmd_encode(args) -> int:
    root = _workspace_dir(args)
    schemas = parse_schemas(root / SCHEMAS_FILE)
    if args.category not in schemas:
        raise TemporalSupportError(f"unknown category {args.category!r}")
    instance = parse_points(root / f"{args.category}.points", schemas[args.category])
    lines = [render_eco(e) for e in encode(instance, args.granularity)]
    text = "\n".join(lines) + "\n"
    if args.output:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    ws = _load(args)
    print(f"workspace {ws.root}: OK")
    for name, ecos in ws.ntoi.categories.items():
        print(f"  category {name}: {len(ecos)} ECOs")
    print(f"  objects: {len(ws.ntoi)}, tuples: {sum(1 for _ in ws.ntoi.all_events())}")
    print(f"  now: {format_time(ws.now)}")
    return 0


def cmd_support(args) -> int:
    report = run_query(_load(args), args.query, kind=args.kind, oracle=args.oracle)
    if args.format == "json":
        if not args.explain:
            for v in report.verdicts:
                v.temporal_witness = v.total_witness = None
        print(report.to_json())
    else:
        print(report.render_text(explain=args.explain))
    return 0


def cmd_classic(args) -> int:
    value = classic_support(_load(args), args.query, kind=args.kind)
    print(f"{value} ({decimal4(value)})")
    return 0


COMMANDS = {"encode": cmd_encode, "validate": cmd_validate,
            "support": cmd_support, "classic": cmd_classic}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (TemporalSupportError, FileNotFoundError) as exc:
        print(f"tsupport: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
