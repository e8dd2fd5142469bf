"""Command-line interface for the experiment harness.

Subcommands: baseline, run, compare-pooling, data-fraction, bench.
Exit codes: 0 on success, 1 when any requested run failed, 2 on config errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .experiments import (ConfigError, cmd_baseline, cmd_bench,
                          cmd_compare_pooling, cmd_data_fraction, cmd_run,
                          load_config, set_workers)

DEFAULT_CONFIG_NAME = "featgenn.ini"


def _add_common(p):
    p.add_argument("--config", help="INI config file (default: ./featgenn.ini "
                                    "if present, else built-in defaults)")
    p.add_argument("--dataset", action="append",
                   help="restrict to this manifest dataset (repeatable)")
    p.add_argument("--seed", type=int, help="override the evolution seed")
    p.add_argument("--runs", type=int, help="independent seeded runs per dataset")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int, help="worker thread limit (0 = all cores)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="featgenn",
        description="Evolved convolutional feature generators for tabular data")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, doc in [("baseline", "score the raw datasets"),
                      ("run", "evolve feature generators"),
                      ("compare-pooling", "correlation vs max pooling, paired seeds"),
                      ("data-fraction", "correlation-data fraction sweep"),
                      ("bench", "baseline + evolution + literature tables")]:
        p = sub.add_parser(name, help=doc)
        _add_common(p)
        if name == "data-fraction":
            p.add_argument("--fractions",
                           help="comma-separated fractions in (0,1], e.g. 0.3,0.6,1.0")
    return parser


def _resolve_config(args):
    path = args.config
    if path is None and Path(DEFAULT_CONFIG_NAME).exists():
        path = DEFAULT_CONFIG_NAME
    cfg = load_config(path)
    if args.seed is not None:
        cfg.evolution = replace(cfg.evolution, seed=args.seed)
    if args.runs is not None:
        if args.runs < 1:
            raise ConfigError("--runs must be at least 1")
        cfg.runs = args.runs
    if args.out is not None:
        cfg.out_dir = args.out
    if args.workers is not None:
        cfg.workers = args.workers
    return cfg


def _print_table(table, failures, skipped):
    rows = table.sorted_rows()
    if rows:
        print(f"{'dataset':<16} {'method':<16} {'mean_f1':>8} {'std':>7} "
              f"{'ref':>8} {'n_gen':>5}")
        for r in rows:
            ref = r.extras.get("reference_mean")
            frac = r.extras.get("fraction")
            label = f"{r.method}@{frac:g}" if frac is not None else r.method
            print(f"{r.dataset:<16} {label:<16} {r.mean_f1:>8.4f} "
                  f"{r.std_f1:>7.4f} "
                  f"{ref if ref is not None else '':>8} {r.n_generated:>5}")
    for name in skipped:
        print(f"skipped {name}: optional dataset file not present")
    for name, msg in failures:
        print(f"FAILED {name}: {msg}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        set_workers(cfg.workers)
        common = dict(datasets=args.dataset, out_dir=cfg.out_dir)
        if args.command == "baseline":
            table, failures, skipped = cmd_baseline(cfg, **common)
        elif args.command == "run":
            table, failures, skipped = cmd_run(cfg, runs=cfg.runs, **common)
        elif args.command == "compare-pooling":
            table, failures, skipped = cmd_compare_pooling(cfg, runs=cfg.runs,
                                                           **common)
        elif args.command == "data-fraction":
            fractions = None
            if args.fractions:
                try:
                    fractions = tuple(float(v) for v in args.fractions.split(","))
                except ValueError:
                    raise ConfigError(f"bad --fractions value: {args.fractions!r}")
            table, failures, skipped = cmd_data_fraction(cfg, runs=cfg.runs,
                                                         fractions=fractions,
                                                         **common)
        else:
            table, failures, skipped = cmd_bench(cfg, runs=cfg.runs, **common)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    _print_table(table, failures, skipped)
    print(f"results written to {cfg.out_dir}/")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
