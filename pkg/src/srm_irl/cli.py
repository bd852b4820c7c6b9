"""Command-line entry point: ``srm-irl <subcommand>``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .config import load_config


def _common(p: argparse.ArgumentParser, dataset: bool = False) -> None:
    p.add_argument("--config", type=Path, default=None, help="TOML experiment configuration")
    p.add_argument("--out", type=Path, default=None, help="output directory (default: config out_dir)")
    p.add_argument("--seed", type=int, default=None, help="base seed (default: config seed)")
    if dataset:
        p.add_argument("--dataset", type=Path, required=True, help="demonstration file from 'generate'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srm-irl", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="train the expert and write a demonstration + learning curve")
    _common(p)

    p = sub.add_parser("erm-sweep", help="ERM parameter error against dataset size")
    _common(p, dataset=True)

    p = sub.add_parser("srm", help="run model selection once on a dataset")
    _common(p, dataset=True)

    p = sub.add_parser("srm-trials", help="repeat data generation + selection and tabulate j*")
    _common(p)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("bounds", help="bound diagnostics for the class chosen in an SRM report")
    _common(p, dataset=True)
    p.add_argument("--report", type=Path, default=None, help="srm_report.json (default: <out>/srm_report.json)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    cfg = load_config(args.config)
    out = args.out or Path(cfg.out_dir)

    if args.command == "generate":
        res = ex.run_generate(cfg, out, args.seed)
        print(f"wrote {res['dataset']} and {res['learning_curve']}")
    elif args.command == "erm-sweep":
        path = ex.run_erm_sweep(cfg, ex.load_dataset(args.dataset), out, args.seed)
        print(f"wrote {path}")
    elif args.command == "srm":
        report = ex.run_srm(cfg, ex.load_dataset(args.dataset), out, args.seed)
        for row in report.table():
            print(
                f"j={row['j']} risk={row['empirical_risk']:.6g} penalty={row['penalty']:.6g} "
                f"structural={row['structural_risk']:.6g}"
            )
        print(f"selected j*={report.selected}")
    elif args.command == "srm-trials":
        outcomes = ex.run_srm_trials(cfg, out, args.seed, args.trials, args.jobs)
        picked = [o.selected for o in outcomes if o.selected is not None]
        for j in range(1, len(cfg.classes) + 1):
            print(f"j={j}: {picked.count(j)}")
        failed = len(outcomes) - len(picked)
        if failed:
            print(f"failed trials: {failed}")
    elif args.command == "bounds":
        report = args.report or out / "srm_report.json"
        diag = ex.run_bounds(cfg, ex.load_dataset(args.dataset), report, out)
        for key in ("delta", "union_bound_value", "srm_bound_value", "linear_srm_bound_value"):
            print(f"{key}={diag[key]:.6g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
