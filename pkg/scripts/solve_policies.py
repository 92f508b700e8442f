"""Solve coalition policies for the interactive bot and write them to
artifacts/ as JSON.  The shipped 1-v-2 policy at mesh 101 was produced by
this script with its default arguments.

Usage: python scripts/solve_policies.py [--n 3] [--mesh 101] [--rule standard]
"""

import argparse
import json
from pathlib import Path

from gutslab.coalition import SolveMode, solve_one_vs_n
from gutslab.payoff import RuleVariant
from gutslab.session import CoalitionPolicy


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=3, help="total players")
    parser.add_argument("--mesh", type=int, default=101)
    parser.add_argument("--rule", choices=["standard", "weenie"], default="standard")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--mode", choices=["full", "pseudo-bloc"], default="full")
    parser.add_argument("--out-dir", default="artifacts")
    args = parser.parse_args()

    rule = RuleVariant(args.rule)
    mode = SolveMode(args.mode) if args.n >= 3 else SolveMode.FULL
    solution = solve_one_vs_n(args.n, args.mesh, mode, rule, seed=args.seed)
    policy = CoalitionPolicy.from_solution(
        solution,
        source=f"solve_one_vs_n(n={args.n}, mesh={args.mesh}, mode={mode.value}, "
        f"rule={rule.value}, seed={args.seed})",
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = f"policy_1v{args.n - 1}_m{args.mesh}_{rule.value}.json"
    path = out_dir / name
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(policy.to_jsonable(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")
    print(f"opponent value {solution.opponent_value!r}")
    print(f"support {solution.decoded_support}")


if __name__ == "__main__":
    main()
