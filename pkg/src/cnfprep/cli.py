"""Command line interface: ``cnfprep {preprocess,extend,stats}``."""

from __future__ import annotations

import argparse
import io
import logging
import sys
from typing import List, Optional

from .formula_io import DimacsError, ModelError, parse_dimacs, parse_model, parse_variable_list, write_model
from .oracle import OracleLimitError, solve_exhaustive
from .pipeline import (
    DEFAULT_TECHNIQUES,
    TECHNIQUES,
    ConfigError,
    PipelineConfig,
    preprocess,
    preprocess_and_emit,
)
from .reconstruct import MapFileError, extend_model, parse_map_file, replay_check

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_REPLAY = 3
EXIT_SAT = 10
EXIT_UNSAT = 20


class CliError(Exception):
    def __init__(self, message: str, status: int = EXIT_ERROR):
        super().__init__(message)
        self.status = status


def _read(path: str) -> bytes:
    try:
        if path == "-":
            return sys.stdin.buffer.read()
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: Optional[str], data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def _technique_list(text: str) -> List[str]:
    names = [t.strip().lower() for t in text.split(",") if t.strip()]
    bad = [n for n in names if n not in TECHNIQUES]
    if bad:
        raise argparse.ArgumentTypeError(
            f"unknown technique(s) {', '.join(bad)}; choose from {','.join(TECHNIQUES)}"
        )
    return names


def _load_formula(path: str):
    try:
        return parse_dimacs(_read(path))
    except DimacsError as exc:
        raise CliError(f"{path}: {exc}") from None


def _config(args) -> PipelineConfig:
    techniques = set(args.enable) if args.enable is not None else set(DEFAULT_TECHNIQUES)
    techniques -= set(args.disable or ())
    try:
        whitelist = parse_variable_list(_read(args.whitelist)) if args.whitelist else set()
        blacklist = parse_variable_list(_read(args.blacklist)) if args.blacklist else set()
    except ValueError as exc:
        raise CliError(f"variable list: {exc}") from None
    if args.compress and whitelist:
        raise CliError("--compress cannot be combined with --whitelist", EXIT_USAGE)
    try:
        return PipelineConfig(
            techniques=frozenset(techniques),
            loop_limit=args.loops,
            whitelist=frozenset(whitelist),
            blacklist=frozenset(blacklist),
            compress_output=args.compress,
            er_max_definitions=args.er_defs,
            er_min_pair=args.er_min,
            probe_budget=args.probe_budget,
        )
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None


def cmd_preprocess(args) -> int:
    doc = _load_formula(args.input)
    cfg = _config(args)
    out_formula = io.BytesIO()
    out_map = io.BytesIO()
    status = preprocess_and_emit(doc, cfg, out_formula, out_map)
    _write(args.out, out_formula.getvalue())
    if args.map:
        _write(args.map, out_map.getvalue())
    return status


def cmd_stats(args) -> int:
    doc = _load_formula(args.input)
    result = preprocess(doc.to_formula(), _config(args))
    s = result.stats
    lines = [
        f"status {'unsat' if result.unsat else 'reduced'}",
        f"variables {s.variables_before} -> {s.variables_after}",
        f"clauses {s.clauses_before} -> {s.clauses_after} ({s.clause_reduction:.1f}%)",
        f"iterations {s.iterations}",
    ]
    lines += [f"{key} {value}" for key, value in sorted(s.counters.items())]
    lines.append(f"time {s.wall_time:.3f}")
    print("\n".join(lines))
    return EXIT_UNSAT if result.unsat else EXIT_OK


def cmd_extend(args) -> int:
    try:
        m = parse_map_file(_read(args.map))
    except MapFileError as exc:
        raise CliError(f"{args.map}: {exc}") from None
    try:
        model = parse_model(_read(args.model))
    except ModelError as exc:
        raise CliError(f"{args.model}: {exc}") from None
    try:
        extended = extend_model(model, m)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    problems = replay_check(extended, m)
    _write(args.out, write_model(extended))
    if problems:
        for p in problems:
            print(f"c replay: {p}", file=sys.stderr)
        return EXIT_REPLAY
    return EXIT_OK


def cmd_oracle(args) -> int:
    doc = _load_formula(args.input)
    try:
        model = solve_exhaustive(doc.to_formula(), args.limit)
    except OracleLimitError as exc:
        raise CliError(str(exc)) from None
    if model is None:
        print("s UNSATISFIABLE")
        return EXIT_UNSAT
    print("s SATISFIABLE")
    sys.stdout.write(write_model(model).decode())
    return EXIT_SAT


def _add_pipeline_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="DIMACS CNF file ('-' for stdin)")
    p.add_argument(
        "--enable",
        type=_technique_list,
        metavar="TECH,...",
        help=f"run exactly these techniques (default: {','.join(t for t in TECHNIQUES if t != 'er')})",
    )
    p.add_argument("--disable", type=_technique_list, metavar="TECH,...", help="techniques to skip")
    p.add_argument("--whitelist", metavar="FILE", help="variables whose meaning must be preserved")
    p.add_argument("--blacklist", metavar="FILE", help="variables always eliminated by ve")
    p.add_argument("--compress", action="store_true", help="renumber remaining variables densely")
    p.add_argument("--loops", type=int, default=5, help="technique loop limit (default 5)")
    p.add_argument("--er-defs", type=int, default=0, help="max extended resolution definitions (default 0)")
    p.add_argument("--er-min", type=int, default=4, help="min pair occurrences for er (default 4)")
    p.add_argument("--probe-budget", type=int, default=200_000, help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cnfprep",
        description="CNF preprocessor with model reconstruction.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log technique activity")
    sub = parser.add_subparsers(dest="command", metavar="{preprocess,extend,stats}", required=True)

    p = sub.add_parser("preprocess", help="simplify a CNF and write the map file")
    _add_pipeline_options(p)
    p.add_argument("--out", metavar="FILE", help="reduced CNF (default stdout)")
    p.add_argument("--map", metavar="FILE", help="map file for model extension")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("extend", help="extend a model of the reduced CNF")
    p.add_argument("--map", required=True, metavar="FILE")
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--out", metavar="FILE", help="default stdout")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("stats", help="print reduction statistics without writing output")
    _add_pipeline_options(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("oracle")
    p.add_argument("input")
    p.add_argument("--limit", type=int, default=26)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING, format="c %(message)s"
    )
    try:
        return args.func(args)
    except CliError as exc:
        print(f"cnfprep: error: {exc}", file=sys.stderr)
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
