"""Run the whole LQR pipeline: expert, ERM sweep, one SRM run, bounds and the trial histogram.

    python scripts/reproduce.py --config configs/default.toml --out results --jobs 4
"""

import argparse
import time
from pathlib import Path

from srm_irl.cli import main


def run(step, *args):
    start = time.perf_counter()
    print(f"== {step}")
    main([step, *args])
    print(f"   {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default="configs/default.toml")
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    common = ["--config", args.config, "--out", str(args.out), "--seed", str(args.seed)]
    dataset = ["--dataset", str(args.out / "demonstration.jsonl")]
    run("generate", *common)
    run("erm-sweep", *common, *dataset)
    run("srm", *common, *dataset)
    run("bounds", *common, *dataset)
    trials = [] if args.trials is None else ["--trials", str(args.trials)]
    run("srm-trials", *common, *trials, "--jobs", str(args.jobs))
