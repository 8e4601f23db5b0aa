#!/usr/bin/env python3
"""Sweep the two optimizers over benchmark objectives and seeds.

    python scripts/bench_optimizers.py --seeds 5 --outdir runs/bench
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import numpy as np

from heartpredict.benchmarks import CONTINUOUS, planted_subset_objective
from heartpredict.cuttlefish import CuttlefishConfig, run_cuttlefish
from heartpredict.elephant_herd import HerdConfig, run_elephant_herd


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--dim", type=int, default=10)
    parser.add_argument("--generations", type=int, default=200)
    parser.add_argument("--outdir", default="runs/bench")
    args = parser.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    for name, objective in sorted(CONTINUOUS.items()):
        finals = []
        for seed in range(args.seeds):
            config = HerdConfig(max_generations=args.generations, seed=seed)
            _, history = run_elephant_herd(objective, args.dim, config)
            finals.append(history[-1])
            path = os.path.join(args.outdir, f"herd_{name}_s{seed}.txt")
            with open(path, "w") as fh:
                for g, v in enumerate(history):
                    fh.write(f"{g}\t{v!r}\n")
        print(
            f"herd {name}: best={max(finals):.3e} "
            f"median={float(np.median(finals)):.3e} over {args.seeds} seeds"
        )

    planted = tuple(range(0, args.dim, max(1, args.dim // 3)))[:3]
    objective = planted_subset_objective(planted, args.dim)
    recovered = 0
    for seed in range(args.seeds):
        config = CuttlefishConfig(generations=args.generations, seed=seed)
        mask, history = run_cuttlefish(objective, args.dim, config)
        if set(planted) <= set(mask.indices):
            recovered += 1
        path = os.path.join(args.outdir, f"cuttlefish_planted_s{seed}.txt")
        with open(path, "w") as fh:
            for g, v in enumerate(history):
                fh.write(f"{g}\t{v!r}\n")
    print(f"cuttlefish planted-subset: recovered {recovered}/{args.seeds} seeds")
    return 0


if __name__ == "__main__":
    sys.exit(main())
