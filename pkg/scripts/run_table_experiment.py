"""Reproduce the pseudo-bloc opponent-value table and the rational fit.

Full range (N=1..15 at mesh 101) takes a few hours of solver time on a
laptop-class machine; pass --max-n 8 for the half-hour desk-scale run.

Usage: python scripts/run_table_experiment.py [--max-n 15] [--mesh 101]
"""

import argparse
import sys

from gutslab.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--max-n", type=int, default=15)
    parser.add_argument("--mesh", type=int, default=101)
    parser.add_argument("--out", default="out/table")
    args = parser.parse_args()

    code = cli_main(
        [
            "table",
            "--min-n", "1",
            "--max-n", str(args.max_n),
            "--mesh", str(args.mesh),
            "--out", args.out,
        ]
    )
    if code != 0:
        return code
    return cli_main(["fit", "--input", f"{args.out}/table.csv", "--out", f"{args.out}/fit"])


if __name__ == "__main__":
    sys.exit(main())
