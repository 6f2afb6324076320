"""Command-line interface.

Subcommands: ``case1``, ``case2``, ``compare``, ``run <config>``,
``poles <matrix-file>``. Diagnostics go to stderr, data to files or stdout.
Exit codes: 0 success, 1 numeric failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import ast
import json
import sys
from pathlib import Path

import numpy as np

from . import harness, spectral
from .config import ExperimentConfig
from .exceptions import ConfigError, FlexctlError, NumericError

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flexctl",
        description="Model-free value-iteration flight control experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("case1", help="nominal online training on both subsystems")
    p1.add_argument("--out", default="results", help="output directory")
    p1.add_argument("--seed", type=int, default=0)
    p1.add_argument("--steps", type=int, default=None)
    p1.add_argument("--format", choices=("csv", "json"), default="csv")

    p2 = sub.add_parser("case2", help="disturbed-robustness sweep")
    p2.add_argument("--out", default="results")
    p2.add_argument("--mode", choices=("combined", "modelfree", "riccati", "all"),
                    default="combined")
    p2.add_argument("--seeds", type=int, default=20, help="number of seeds")
    p2.add_argument("--seed", type=int, default=0, help="first seed of the sweep")
    p2.add_argument("--steps", type=int, default=None)
    p2.add_argument("--format", choices=("csv", "json"), default="csv")

    pc = sub.add_parser("compare", help="tabulate gains across solution routes")
    pc.add_argument("--out", default=None, help="write the JSON report here")
    pc.add_argument("--format", choices=("json", "csv"), default="json")

    pr = sub.add_parser("run", help="execute a configuration file")
    pr.add_argument("config", help="path to a flat key/value configuration")
    pr.add_argument("--out", default="results")
    pr.add_argument("--seed", type=int, default=None, help="override the seed list")
    pr.add_argument("--steps", type=int, default=None)
    pr.add_argument("--mode", default=None)
    pr.add_argument("--variant", choices=("standard", "paper-literal"), default=None)
    pr.add_argument("--format", choices=("csv", "json"), default="csv")

    pp = sub.add_parser("poles", help="eigenvalues of a matrix file")
    pp.add_argument("matrix", help="file with a bracket-list matrix literal "
                                   "or a config-style 'a = [[...]]' line")
    pp.add_argument("--out", default=None, help="write JSON here instead of stdout")
    pp.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def _read_matrix_file(path: str) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8")
    payload = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" in line:
            key, _, rhs = line.partition("=")
            if key.strip().lower() in ("a", "matrix"):
                payload = rhs.strip()
                break
        else:
            payload = text
            break
    if payload is None:
        raise ConfigError(f"no matrix literal found in {path}")
    try:
        return np.array(ast.literal_eval(payload), dtype=float)
    except (ValueError, SyntaxError) as exc:
        raise ConfigError(f"could not parse matrix literal in {path}: {exc}") from exc


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _records_note(records) -> None:
    for record in records:
        print(f"[flexctl] {record.name}: settling_time={record.settling_time} "
              f"files={sorted(record.files)}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "case1":
            records = harness.run_case_study_1(args.out, seed=args.seed, steps=args.steps)
            _records_note(records)
        elif args.command == "case2":
            modes = ("combined", "modelfree", "riccati") if args.mode == "all" else (args.mode,)
            seeds = tuple(range(args.seed, args.seed + args.seeds))
            for mode in modes:
                records = harness.run_case_study_2(args.out, mode=mode, seeds=seeds,
                                                   steps=args.steps)
                _records_note(records)
        elif args.command == "compare":
            report = harness.compare_gains()
            _emit(report, args.out)
        elif args.command == "run":
            cfg = ExperimentConfig.from_file(args.config)
            if args.seed is not None:
                cfg.seeds = (args.seed,)
            if args.steps is not None:
                cfg.steps = args.steps
            if args.mode is not None:
                cfg.mode = args.mode
            if args.variant is not None:
                cfg.riccati_variant = args.variant
            cfg.validate()
            records = harness.run_config(cfg, args.out)
            _records_note(records)
        elif args.command == "poles":
            matrix = _read_matrix_file(args.matrix)
            poles = spectral.eigenvalues(matrix)
            _emit(harness.poles_payload(poles), args.out)
    except ConfigError as exc:
        print(f"flexctl: configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"flexctl: numeric failure: {exc}", file=sys.stderr)
        return 1
    except FlexctlError as exc:
        print(f"flexctl: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
