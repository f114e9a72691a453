# backend/cli.py - workbench 명령행 진입점
"""
python cli.py marked-dist --group1 cyclic:4 --group2 cyclic:6 --rmax 8
python cli.py ca-apply --rule eca:90 --config 0,0,0,1 --period 4
python cli.py surj-1d --rule eca:0
"""

import argparse
import json
import logging
import sys
from typing import Dict, List, Optional, Sequence

from pydantic import ValidationError

from constants import COMMANDS, EXIT_OK, EXIT_PARSE_ERROR, OUTPUT_FORMATS
from models import ExperimentSpec
from services.experiment_runner import render, run
from workbench.shared import error_handler, metrics
from workbench.shared.config import settings

logger = logging.getLogger(__name__)

# 옵션 이름 -> argparse 설정
OPTIONS: Dict[str, dict] = {
    "group": dict(help="group shorthand: cyclic:n, zd:d, free:k, sym:n, trivial, finite:<path>"),
    "group1": dict(help="first group shorthand"),
    "group2": dict(help="second group shorthand"),
    "groups": dict(nargs="+", help="sequence of group shorthands"),
    "limit": dict(help="limit group shorthand"),
    "rule": dict(help="rule shorthand: eca:<n> or file:<path>"),
    "rule2": dict(help="second rule shorthand (applied first)"),
    "kernel": dict(help="linear kernel file"),
    "matrix": dict(help="group-algebra matrix file"),
    "inverse": dict(help="one-sided inverse matrix file"),
    "subshift": dict(help="full, fix:<group> or period:<n>"),
    "config": dict(help="configuration literal, e.g. 0,0,0,1"),
    "period": dict(type=int),
    "alphabet": dict(type=int, help="alphabet size"),
    "prime": dict(type=int),
    "radius": dict(type=int),
    "rmax": dict(type=int, help="largest radius examined"),
    "bound": dict(type=int, help="largest memory radius searched"),
    "max_period": dict(type=int),
    "side": dict(choices=["left", "right"]),
    "trials": dict(type=int),
    "size": dict(type=int, help="matrix size"),
    "seed": dict(type=int),
    "minimize": dict(action="store_true", default=None),
    "cap": dict(type=int, help="resource cap override"),
}

COMMAND_OPTIONS: Dict[str, List[str]] = {
    'marked-dist': ["group1", "group2", "rmax", "cap"],
    'fix-window': ["group", "alphabet", "radius", "cap"],
    'hb-dist': ["group1", "group2", "alphabet", "rmax"],
    'ca-apply': ["rule", "config", "period", "group"],
    'ca-compose': ["rule", "rule2", "cap"],
    'ca-synthesize': ["rule", "bound", "group", "minimize", "cap"],
    'lin-decide': ["kernel", "group"],
    'lin-inverse': ["kernel", "group"],
    'stable-finite': ["group", "matrix", "inverse", "prime", "side", "trials", "size", "seed"],
    'surj-1d': ["rule", "cap"],
    'inj-1d': ["rule", "cap"],
    'gromov-radius': ["rule", "subshift"],
    'transfer-check': ["rule", "subshift", "radius", "max_period", "cap"],
    'converge': ["groups", "limit", "rule", "kernel", "rmax", "cap"],
    'eca-sweep': ["max_period"],
    'psi-bounds': ["groups", "alphabet", "rmax", "cap"],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="workbench", description="Cellular automata over groups and their quotients")
    parser.add_argument("--verbose", "-v", action="count", default=0, help="-v info, -vv debug")
    parser.add_argument("--metrics", action="store_true", help="print metrics summary to stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = subparsers.add_parser(command)
        for name in COMMAND_OPTIONS[command]:
            kwargs = dict(OPTIONS[name])
            kwargs.setdefault("default", None)
            sub.add_argument(f"--{name.replace('_', '-')}", dest=name, **kwargs)
        sub.add_argument("--format", choices=OUTPUT_FORMATS, default="table")
        sub.add_argument("--dump", help="write the result in its file format")
    return parser


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    values = {"command": args.command, "format": args.format, "dump": args.dump}
    for name in COMMAND_OPTIONS[args.command]:
        value = getattr(args, name)
        if value is not None:
            values[name] = value
    return ExperimentSpec(**values)


def _configure_logging(verbose: int):
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, settings.log_level.upper(), logging.WARNING)
        level = max(level, logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE_ERROR if e.code else EXIT_OK
    _configure_logging(args.verbose)

    try:
        spec = spec_from_args(args)
    except ValidationError as e:
        error = e.errors()[0]
        print(f"error: {'.'.join(map(str, error['loc']))}: {error['msg']}", file=sys.stderr)
        return EXIT_PARSE_ERROR

    result = run(spec)
    if result.ok:
        sys.stdout.write(render(result, spec.format))
    else:
        print(f"error: {result.error}", file=sys.stderr)

    if args.metrics:
        summary = {"metrics": metrics.get_metrics_summary(), "errors": error_handler.get_error_stats()}
        print(json.dumps(summary, sort_keys=True, indent=2, default=str), file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
