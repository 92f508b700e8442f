"""Fictitious-play experiments: 3-player guts convergence to the symmetric
equilibrium and the example-game runs (coalition selection).

Writes per-iteration traces (iteration, plays, g, G) suitable for plotting
the gap-decay and play-convergence figures.

Usage: python scripts/run_fp_experiments.py [--mesh 501] [--iters 10000]
"""

import argparse
import sys

from gutslab.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--mesh", type=int, default=501)
    parser.add_argument("--iters", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", default="out/fp")
    args = parser.parse_args()

    runs = [
        ["fp", "--game", "guts", "--n", "3", "--mesh", str(args.mesh),
         "--iters", str(args.iters), "--seed", str(args.seed),
         "--out", f"{args.out}/guts3"],
        ["fp", "--game", "jacob", "--iters", "20000", "--seed", str(args.seed),
         "--out", f"{args.out}/jacob"],
        ["fp", "--game", "jacob-ii", "--iters", "20000", "--seed", "1",
         "--out", f"{args.out}/jacob-ii"],
        ["fp", "--game", "jacob-mega", "--iters", "50000", "--seed", "1",
         "--out", f"{args.out}/jacob-mega"],
    ]
    for argv in runs:
        code = cli_main(argv)
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
