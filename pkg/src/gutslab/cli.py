"""Command-line surface for the experiments.

Every command writes its data artifacts plus a manifest.json recording the
command, all parameters, artifact checksums, and wall-clock duration, so a
run can be reproduced bit-for-bit (the duration field aside).  Data goes
to files; progress heartbeats go to stderr.  Exit codes: 0 success/
converged, 2 solver finished without converging, 1 error.
"""

from __future__ import annotations

import argparse
import contextlib
import hashlib
import json
import os
import sys
import threading
import time
from pathlib import Path

import numpy as np

from .coalition import (
    SolveMode,
    fit_rational,
    run_table,
    solve_one_vs_n,
    verify_weenie_optimality,
)
from .core import GutslabError
from .dynamics import (
    GutsOneShotGame,
    jacob_game,
    jacob_game_ii,
    jacob_game_mega,
    multiplayer_fp,
)
from .payoff import RuleVariant
from .session import PolicyStore
from .matrices import DEFAULT_MEMORY_BUDGET

HEARTBEAT_SECONDS = 10.0


@contextlib.contextmanager
def _heartbeat(label: str):
    """Emit a stderr progress line every 10 s while the block runs."""
    stop = threading.Event()
    start = time.monotonic()

    def beat():
        while not stop.wait(HEARTBEAT_SECONDS):
            elapsed = time.monotonic() - start
            print(f"heartbeat: {label} running {elapsed:.0f}s", file=sys.stderr, flush=True)

    thread = threading.Thread(target=beat, daemon=True)
    thread.start()
    try:
        yield
    finally:
        stop.set()
        thread.join(timeout=1.0)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(path: Path, payload: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out_dir: Path, command: str, parameters: dict, artifacts, started: float):
    manifest = {
        "command": command,
        "parameters": parameters,
        "artifacts": {name: _sha256(out_dir / name) for name in artifacts},
        "duration_seconds": time.time() - started,
    }
    _write_json(out_dir / "manifest.json", manifest)


def _rule(name: str) -> RuleVariant:
    return RuleVariant(name)


def _threads(args) -> int | None:
    env = os.environ.get("RGL_THREADS")
    if env is not None:
        return int(env)
    return args.threads


def _fmt(value) -> str:
    if value is None:
        return "-"
    return repr(float(value))


def cmd_solve(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    mode = SolveMode(args.mode) if args.n >= 3 else SolveMode.FULL
    with _heartbeat(f"solve n={args.n} mesh={args.mesh}"):
        solution = solve_one_vs_n(
            args.n,
            args.mesh,
            mode,
            _rule(args.rule),
            seed=args.seed,
            tolerance=args.tolerance,
            memory_budget=args.memory_budget,
            threads=_threads(args),
        )
    _write_json(out_dir / "solution.json", solution.to_jsonable())
    with open(out_dir / "trace.csv", "w", encoding="utf-8") as fh:
        fh.write("n,V_n,gap_n\n")
        for n, v, gap in solution.solve.trace_rows():
            fh.write(f"{n},{v!r},{'' if gap is None else repr(gap)}\n")
    artifacts = ["solution.json", "trace.csv"]
    if args.verify:
        with _heartbeat("verification checks"):
            _write_json(out_dir / "verification.json", _verify_solution(args, mode, solution))
        artifacts.append("verification.json")
    _write_manifest(
        out_dir,
        "solve",
        {
            "n": args.n,
            "mesh": args.mesh,
            "mode": mode.value,
            "rule": args.rule,
            "seed": args.seed,
            "tolerance": args.tolerance,
            "verify": args.verify,
        },
        artifacts,
        started,
    )
    print(f"opponent_value {solution.opponent_value!r} converged {solution.solve.converged}")
    return 0 if solution.solve.converged else 2


def _verify_solution(args, mode: SolveMode, solution) -> dict:
    """Transition / rate / attraction certificates for a finished solve."""
    from .core import make_grid
    from .matrices import build_bloc_matrices, build_full_matrices, build_pseudo_bloc_matrices
    from .recursive import (
        RecursiveGameSpec,
        check_attraction_above,
        check_transition,
        restricted_value_iteration,
    )

    grid = make_grid(args.mesh)
    rule = _rule(args.rule)
    if args.n == 2:
        matrices = build_full_matrices(2, grid, rule)
    elif mode is SolveMode.FULL:
        matrices = build_full_matrices(args.n, grid, rule, memory_budget=args.memory_budget)
    else:
        matrices = build_pseudo_bloc_matrices(args.n, grid, rule, memory_budget=args.memory_budget)
    spec = RecursiveGameSpec(matrices=matrices)
    strategy = solution.solve.row_strategy
    fixed_point = solution.solve.fixed_point
    trace = restricted_value_iteration(matrices, strategy, -1.0, 400)
    forced = trace[-1]
    transition = check_transition(spec, strategy, v_star=-1.0, v_upper=forced)
    attracting, margins = check_attraction_above(spec, fixed_point, [1e-3, 1e-2])
    return {
        "fixed_point": fixed_point,
        "forced_value_under_repeated_strategy": forced,
        "transition": transition.to_jsonable(),
        "attracting_from_above": attracting,
        "attraction_margins": [[d, m] for d, m in margins],
    }


def cmd_table(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    sizes = range(args.min_n, args.max_n + 1)

    def progress(sol):
        print(
            f"heartbeat: table row N={sol.n - 1} done, value {sol.opponent_value:.4f}",
            file=sys.stderr,
            flush=True,
        )

    with _heartbeat(f"table N={args.min_n}..{args.max_n} mesh={args.mesh}"):
        rows = run_table(
            sizes,
            args.mesh,
            _rule(args.rule),
            seed=args.seed,
            tolerance=args.tolerance,
            progress=progress,
        )
    with open(out_dir / "table.csv", "w", encoding="utf-8") as fh:
        fh.write("N,opponent_value,player1_strategy,bloc_strategy,pseudo_bloc_strategy\n")
        for sol in rows:
            fh.write(
                f"{sol.n - 1},{sol.opponent_value!r},{_fmt(sol.player1_threshold())},"
                f"{_fmt(sol.bloc_strategy())},{_fmt(sol.pseudo_bloc_strategy())}\n"
            )
    _write_json(
        out_dir / "table.json", {"rows": [sol.to_jsonable() for sol in rows]}
    )
    _write_manifest(
        out_dir,
        "table",
        {
            "min_n": args.min_n,
            "max_n": args.max_n,
            "mesh": args.mesh,
            "rule": args.rule,
            "seed": args.seed,
            "tolerance": args.tolerance,
        },
        ["table.csv", "table.json"],
        started,
    )
    converged = all(sol.solve.converged for sol in rows)
    return 0 if converged else 2


def cmd_fit(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    points = []
    with open(args.input, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        n_col = 0
        v_col = 1
        if "opponent_value" in header:
            v_col = header.index("opponent_value")
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) <= max(n_col, v_col) or not parts[v_col]:
                continue
            points.append((float(parts[n_col]), float(parts[v_col])))
    fit = fit_rational(points)
    _write_json(
        out_dir / "fit.json",
        {
            "a": fit.a,
            "b": fit.b,
            "c": fit.c,
            "r_squared": fit.r_squared,
            "form": "a - b / (n - c)",
            "points": [[n, v] for n, v in points],
        },
    )
    _write_manifest(
        out_dir, "fit", {"input": str(args.input)}, ["fit.json"], started
    )
    print(f"a {fit.a!r} b {fit.b!r} c {fit.c!r} r2 {fit.r_squared!r}")
    return 0


_FP_GAMES = {
    "jacob": jacob_game,
    "jacob-ii": jacob_game_ii,
    "jacob-mega": jacob_game_mega,
}


def cmd_fp(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    if args.game == "guts":
        game = GutsOneShotGame(args.n, args.mesh, _rule(args.rule))
    elif args.game in _FP_GAMES:
        game = _FP_GAMES[args.game]()
    else:
        raise GutslabError(f"unknown game {args.game!r}")
    with _heartbeat(f"fp game={args.game} iters={args.iters}"):
        trace = multiplayer_fp(game, args.iters, seed=args.seed)
    with open(out_dir / "fp_trace.csv", "w", encoding="utf-8") as fh:
        players = trace.plays.shape[1]
        cols = ",".join(f"play_{j + 1}" for j in range(players))
        fh.write(f"iteration,{cols},g,G\n")
        for t in range(trace.iterations):
            plays = ",".join(str(int(p)) for p in trace.plays[t])
            g = trace.gap_trace[t, 1]
            big_g = trace.gap_trace[t, 2]
            fh.write(f"{t + 1},{plays},{g!r},{big_g!r}\n")
    _write_json(
        out_dir / "fp_summary.json",
        {
            "game": game.name,
            "iterations": trace.iterations,
            "final_plays": list(trace.final_plays()),
            "final_gap": float(trace.gap_trace[-1, 1]),
            "distributions": [
                d.as_index_map(1e-9) for d in trace.distributions
            ],
            "mean_realized": [float(x) for x in trace.realized.mean(axis=0)],
        },
    )
    _write_manifest(
        out_dir,
        "fp",
        {
            "game": args.game,
            "n": args.n,
            "mesh": args.mesh,
            "rule": args.rule,
            "iters": args.iters,
            "seed": args.seed,
        },
        ["fp_trace.csv", "fp_summary.json"],
        started,
    )
    return 0


def cmd_weenie_check(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    with _heartbeat(f"weenie-check n={args.n} mesh={args.mesh}"):
        minimum, argmin = verify_weenie_optimality(args.n, args.mesh)
    from .coalition import nash_threshold

    _write_json(
        out_dir / "weenie_check.json",
        {
            "n": args.n,
            "mesh": args.mesh,
            "minimum": minimum,
            "argmin": list(argmin),
            "nash_threshold": nash_threshold(args.n, RuleVariant.WEENIE),
            "optimal": bool(minimum >= -1e-9),
        },
    )
    _write_manifest(
        out_dir,
        "weenie-check",
        {"n": args.n, "mesh": args.mesh},
        ["weenie_check.json"],
        started,
    )
    print(f"minimum {minimum!r} at {argmin}")
    return 0 if minimum >= -1e-9 else 2


def cmd_serve(args) -> int:
    from .service import serve

    store = PolicyStore(compute_on_demand=args.on_demand)
    for path in args.policy or []:
        store.load_file(path)
    port = args.port
    env_port = os.environ.get("RGL_PORT")
    if env_port is not None and args.port == 8000:
        port = int(env_port)
    print(f"serving on port {port}", file=sys.stderr)
    serve(store, host=args.host, port=port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gutslab",
        description="solver workbench for recursive guts games",
    )
    parser.add_argument("--threads", type=int, default=None, help="worker threads (RGL_THREADS overrides)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one 1-vs-(n-1) coalition game")
    p.add_argument("--n", type=int, required=True, help="total players")
    p.add_argument("--mesh", type=int, default=101)
    p.add_argument("--mode", choices=["full", "pseudo-bloc"], default="pseudo-bloc")
    p.add_argument("--rule", choices=["standard", "weenie"], default="standard")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--memory-budget", type=int, default=DEFAULT_MEMORY_BUDGET)
    p.add_argument("--verify", action="store_true",
                   help="write transition/attraction certificates as JSON")
    p.add_argument("--out", default="out/solve")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", help="pseudo-bloc opponent-value table")
    p.add_argument("--min-n", type=int, default=1, help="smallest coalition size")
    p.add_argument("--max-n", type=int, default=15, help="largest coalition size")
    p.add_argument("--mesh", type=int, default=101)
    p.add_argument("--rule", choices=["standard", "weenie"], default="standard")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--out", default="out/table")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("fit", help="fit a - b/(n - c) to table values")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default="out/fit")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("fp", help="multiplayer fictitious play run")
    p.add_argument("--game", choices=["guts", "jacob", "jacob-ii", "jacob-mega"], default="guts")
    p.add_argument("--n", type=int, default=3, help="players (guts only)")
    p.add_argument("--mesh", type=int, default=501, help="grid size (guts only)")
    p.add_argument("--rule", choices=["standard", "weenie"], default="standard")
    p.add_argument("--iters", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out/fp")
    p.set_defaults(func=cmd_fp)

    p = sub.add_parser("weenie-check", help="scan weenie Nash optimality on a grid")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--mesh", type=int, default=1001)
    p.add_argument("--out", default="out/weenie")
    p.set_defaults(func=cmd_weenie_check)

    p = sub.add_parser("serve", help="host the interactive bot service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000, help="RGL_PORT overrides the default")
    p.add_argument("--policy", action="append", help="policy JSON file (repeatable)")
    p.add_argument("--on-demand", action="store_true", help="solve missing policies on the fly")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GutslabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
