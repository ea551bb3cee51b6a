"""Command-line entry point: ``honeyscan analyze`` and ``honeyscan forensics``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import forensics
from .bytecode import load_bytecode
from .config import FAST_TIMEOUT_S, RunConfig
from .report import analyze_path, collect_inputs, emit_report
from .solver import SolverError, SolverUnavailable

log = logging.getLogger("honeyscan")

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2
EXIT_FINDINGS = 3


def build_parser() -> argparse.ArgumentParser:
    defaults = RunConfig()
    parser = argparse.ArgumentParser(prog="honeyscan", description="Honeypot detection for EVM runtime bytecode.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="analyse bytecode files or directories")
    an.add_argument("inputs", nargs="+", help="hex or binary runtime bytecode files, or directories of them")
    an.add_argument("--solver-timeout-ms", type=int, default=defaults.solver_timeout_ms)
    an.add_argument("--timeout-s", type=float, default=None,
                    help=f"global timeout per contract (default {defaults.global_timeout_s:g})")
    an.add_argument("--loop-limit", type=int, default=defaults.loop_limit)
    an.add_argument("--depth-limit", type=int, default=defaults.depth_limit)
    an.add_argument("--gas-limit", type=int, default=defaults.gas_limit)
    an.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    an.add_argument("--format", choices=("json", "text"), default="json")
    an.add_argument("--out", help="write the report here instead of stdout")
    an.add_argument("--debug-dir", help="write CFG (DOT) and path dumps per contract here")
    an.add_argument("--fail-on-findings", action="store_true",
                    help=f"exit with {EXIT_FINDINGS} when any detector fires")
    an.add_argument("--fast", action="store_true", help=f"global timeout of {FAST_TIMEOUT_S} s")

    fo = sub.add_parser("forensics", help="label actors and compute profit from a transaction log")
    fo.add_argument("transactions", help="line-delimited JSON transaction records")
    fo.add_argument("--bytecode-dir", help="directory of contract bytecode for the similarity matrix")
    fo.add_argument("--similarity", action="store_true", help="include pairwise bytecode similarity")
    fo.add_argument("--out", help="write the result here instead of stdout")
    return parser


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def run_analyze(args) -> int:
    timeout = args.timeout_s if args.timeout_s is not None else (FAST_TIMEOUT_S if args.fast else None)
    if args.jobs <= 0:
        raise ValueError(f"--jobs must be positive, got {args.jobs}")
    # RunConfig rejects non-positive limits; that is a fatal configuration error
    config = RunConfig(
        solver_timeout_ms=args.solver_timeout_ms,
        loop_limit=args.loop_limit,
        depth_limit=args.depth_limit,
        gas_limit=args.gas_limit,
        output_format=args.format,
        debug_dir=args.debug_dir,
        **({"global_timeout_s": timeout} if timeout is not None else {}),
    )
    missing = [p for p in args.inputs if not Path(p).exists()]
    for p in missing:
        log.error("no such file or directory: %s", p)
    reports = analyze_path([p for p in args.inputs if p not in missing], config, jobs=args.jobs)
    _write(emit_report(reports, args.format), args.out)
    if missing or any(r.error for r in reports):
        return EXIT_PARTIAL
    if args.fail_on_findings and any(r.findings for r in reports):
        return EXIT_FINDINGS
    return EXIT_OK


def run_forensics(args) -> int:
    txs = forensics.load_transactions(args.transactions)
    result = {
        "schema": 1,
        "honeypots": [forensics.analyze_contract(group) for _, group in sorted(forensics.by_contract(txs).items())],
    }
    if args.similarity:
        if not args.bytecode_dir:
            raise ValueError("--similarity needs --bytecode-dir")
        codes = {f.name: load_bytecode(f) for f in collect_inputs(args.bytecode_dir)}
        result["similarity"] = forensics.similarity_matrix(codes)
    _write(json.dumps(result, indent=2) + "\n", args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "analyze":
            return run_analyze(args)
        return run_forensics(args)
    except (SolverUnavailable, SolverError) as exc:
        log.error("solver failure: %s", exc)
        return EXIT_FATAL
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
