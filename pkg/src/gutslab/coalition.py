"""Coalition experiments: 1-vs-(n-1) solves (full and pseudo-bloc),
the opponent-value table, rational curve fit, Nash thresholds, the weenie
optimality scan, and the 2-vs-2 split.

Coalition payoffs are exchangeable in the members, so permuted strategy
tuples index identical matrix columns.  Solves collapse such duplicates
onto a canonical (sorted) representative before running the inner solver
and expand the mixture back afterwards; reported supports are canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import least_squares

from .core import (
    CoalitionIndex,
    Grid,
    GutslabError,
    InvalidProfileError,
    MixedStrategy,
    StakedBimatrix,
    make_grid,
)
from .matrices import (
    DEFAULT_MEMORY_BUDGET,
    build_full_matrices,
    build_pseudo_bloc_matrices,
    build_two_coalition_matrices,
)
from .payoff import RuleVariant, alpha_player1_many
from .recursive import (
    RecursiveGameSpec,
    RecursiveSolveResult,
    ValueIterationConfig,
    value_iteration,
)

SUPPORT_PRUNE_THRESHOLD = 1e-3  # fictitious play leaves long noise tails


class SolveMode(Enum):
    FULL = "full"
    PSEUDO_BLOC = "pseudo-bloc"


class FitFailureError(GutslabError, RuntimeError):
    pass


@dataclass(frozen=True)
class CoalitionSolution:
    """Solved 1-vs-(n-1) coalition game.

    opponent_value is what the coalition forces (= -player-1 value).
    decoded_support lists (threshold tuple, weight) pairs for the coalition,
    pruned, renormalized, and sorted by weight; full-mode tuples are
    canonical ascending.  player1_support likewise for the row player.
    """

    n: int
    mesh_points: int
    mode: SolveMode
    rule: RuleVariant
    opponent_value: float
    player1_strategy: MixedStrategy
    coalition_strategy: MixedStrategy
    decoded_support: tuple[tuple[tuple[float, ...], float], ...]
    player1_support: tuple[tuple[float, float], ...]
    solve: RecursiveSolveResult

    @property
    def player1_value(self) -> float:
        return -self.opponent_value

    @property
    def grid_step(self) -> float:
        return 1.0 / (self.mesh_points - 1)

    def player1_threshold(self) -> float:
        """Highest-weight player-1 support threshold."""
        return self.player1_support[0][0]

    def bloc_strategy(self) -> float | None:
        """Threshold of the heaviest (near-)bloc coalition support point.

        The inner solver splits hairs between adjacent grid columns of
        near-identical value, so members within 1.5 grid steps of each
        other count as a bloc; the reported threshold is the top member.
        """
        for thresholds, weight in self.decoded_support:
            spread = max(thresholds) - min(thresholds)
            if spread <= 1.5 * self.grid_step and min(thresholds) > 0.0:
                return max(thresholds)
        return None

    def bloc_weight(self) -> float:
        """Total weight of (near-)bloc support points."""
        total = 0.0
        for thresholds, weight in self.decoded_support:
            spread = max(thresholds) - min(thresholds)
            if spread <= 1.5 * self.grid_step and min(thresholds) > 0.0:
                total += weight
        return total

    def _is_pseudo_bloc_point(self, thresholds) -> bool:
        # deviator (first component after canonicalization) at or next to 0,
        # the rest strictly above it
        return (
            len(thresholds) >= 2
            and thresholds[0] <= 1.5 * self.grid_step
            and thresholds[1] > thresholds[0] + 1.5 * self.grid_step
        )

    def pseudo_bloc_strategy(self) -> float | None:
        """Bloc component of the heaviest support point whose deviating
        member plays (essentially) 0, the always-hold threshold."""
        for thresholds, _ in self.decoded_support:
            if self._is_pseudo_bloc_point(thresholds):
                return max(thresholds[1:])
        return None

    def pseudo_bloc_weight(self) -> float:
        total = 0.0
        for thresholds, weight in self.decoded_support:
            if self._is_pseudo_bloc_point(thresholds):
                total += weight
        return total

    def to_jsonable(self) -> dict:
        return {
            "n": self.n,
            "coalition_size": self.n - 1,
            "mesh_points": self.mesh_points,
            "mode": self.mode.value,
            "rule": self.rule.value,
            "opponent_value": self.opponent_value,
            "player1_value": self.player1_value,
            "player1_support": [[t, w] for t, w in self.player1_support],
            "coalition_support": [[list(t), w] for t, w in self.decoded_support],
            "player1_strategy_column": self.player1_threshold(),
            "bloc_strategy_column": self.bloc_strategy(),
            "pseudo_bloc_strategy_column": self.pseudo_bloc_strategy(),
            "converged": self.solve.converged,
            "value_trace": list(self.solve.trace),
        }


@dataclass(frozen=True)
class TwoCoalitionSolution:
    """2-vs-2 split: both sides are coalitions of two."""

    mesh_points: int
    rule: RuleVariant
    value: float
    row_support: tuple[tuple[tuple[float, float], float], ...]
    col_support: tuple[tuple[tuple[float, float], float], ...]
    solve: RecursiveSolveResult


@dataclass(frozen=True)
class RationalFit:
    """Least-squares fit of value(n) = a - b / (n - c)."""

    a: float
    b: float
    c: float
    r_squared: float

    def __call__(self, n) -> np.ndarray:
        return self.a - self.b / (np.asarray(n, dtype=float) - self.c)


def nash_threshold(n: int, rule: RuleVariant = RuleVariant.STANDARD) -> float:
    """Symmetric Nash threshold: (1/2)^(1/(n-1)), or (1/3)^(1/(n-1)) under
    the weenie rule."""
    if n < 2:
        raise InvalidProfileError("need at least 2 players")
    base = 3.0 if rule is RuleVariant.WEENIE else 2.0
    return (1.0 / base) ** (1.0 / (n - 1))


def _dedupe_columns(matrices: StakedBimatrix, tuples: np.ndarray):
    """Collapse payoff-identical columns (permuted member tuples).

    Returns (reduced matrices, canonical tuples (K, m), representative
    column ids, inverse map full column -> reduced id).
    """
    sorted_tuples = np.sort(tuples, axis=1)
    _, rep_idx, inverse = np.unique(
        sorted_tuples, axis=0, return_index=True, return_inverse=True
    )
    reduced = StakedBimatrix(
        alpha=matrices.alpha[:, rep_idx], beta=matrices.beta[:, rep_idx]
    )
    return reduced, sorted_tuples[rep_idx], rep_idx, inverse


def _decode_support(
    strategy: MixedStrategy, tuples: np.ndarray, prune: float = SUPPORT_PRUNE_THRESHOLD
):
    pruned = strategy.pruned(prune)
    support = [
        (tuple(float(v) for v in tuples[i]), float(w))
        for i, w in pruned.as_index_map().items()
    ]
    support.sort(key=lambda item: -item[1])
    return tuple(support), pruned


def solve_one_vs_n(
    n: int,
    mesh_points: int,
    mode: SolveMode = SolveMode.PSEUDO_BLOC,
    rule: RuleVariant = RuleVariant.STANDARD,
    *,
    seed: int = 0,
    tolerance: float = 1e-4,
    inner_max_iterations: int = 1_000_000,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    threads: int | None = None,
) -> CoalitionSolution:
    """Solve player 1 vs an (n-1)-coalition for the recursive game value.

    Builds the staked matrices, runs value iteration with t1 = 1, and
    decodes the optimal fixed-point strategies.
    """
    if n < 2:
        raise InvalidProfileError("need at least 2 players")
    grid = make_grid(mesh_points)
    values = grid.as_array()
    if mode is SolveMode.PSEUDO_BLOC and n >= 3:
        matrices = build_pseudo_bloc_matrices(
            n, grid, rule, memory_budget=memory_budget, threads=threads
        )
        idx = CoalitionIndex(coalition_size=2, base=mesh_points)
        tuples = values[idx.decode_all(np.arange(idx.num_columns))]
        collapse = n == 3  # only then are the two roles interchangeable
    elif mode is SolveMode.PSEUDO_BLOC:
        raise InvalidProfileError("pseudo-bloc mode needs n >= 3; use FULL for n=2")
    else:
        matrices = build_full_matrices(
            n, grid, rule, memory_budget=memory_budget, threads=threads
        )
        idx = CoalitionIndex(coalition_size=n - 1, base=mesh_points)
        tuples = values[idx.decode_all(np.arange(idx.num_columns))]
        collapse = n >= 3

    if collapse:
        reduced, red_tuples, rep_idx, _ = _dedupe_columns(matrices, tuples)
    else:
        reduced, red_tuples, rep_idx = matrices, tuples, np.arange(tuples.shape[0])

    config = ValueIterationConfig(
        tolerance=tolerance, seed=seed, inner_max_iterations=inner_max_iterations
    )
    spec = RecursiveGameSpec(matrices=reduced, termination_fee_t1=1.0)
    result = value_iteration(spec, config=config)

    support, pruned_col = _decode_support(result.col_strategy, red_tuples)
    full_col = np.zeros(tuples.shape[0])
    full_col[rep_idx] = pruned_col.as_array()
    p1_support, p1_pruned = _decode_support(
        result.row_strategy, values[:, None]
    )
    return CoalitionSolution(
        n=n,
        mesh_points=mesh_points,
        mode=mode,
        rule=rule,
        opponent_value=-result.fixed_point,
        player1_strategy=p1_pruned,
        coalition_strategy=MixedStrategy.from_weights(full_col),
        decoded_support=support,
        player1_support=tuple((t[0], w) for t, w in p1_support),
        solve=result,
    )


def run_table(
    coalition_sizes,
    mesh_points: int = 101,
    rule: RuleVariant = RuleVariant.STANDARD,
    *,
    seed: int = 0,
    tolerance: float = 1e-4,
    progress=None,
) -> list[CoalitionSolution]:
    """Pseudo-bloc opponent-value table, one row per coalition size N
    (N = 1 solves the plain 2-player game in full mode)."""
    rows = []
    for size in coalition_sizes:
        n = size + 1
        mode = SolveMode.PSEUDO_BLOC if n >= 3 else SolveMode.FULL
        sol = solve_one_vs_n(
            n, mesh_points, mode, rule, seed=seed, tolerance=tolerance
        )
        rows.append(sol)
        if progress is not None:
            progress(sol)
    return rows


def fit_rational(points) -> RationalFit:
    """Least-squares fit of a - b/(n - c) to (n, value) pairs.

    The pole c is constrained below the data range.  r_squared uses a
    total-variance guard so constant data (b ~ 0) stays well-defined.
    """
    pts = sorted((float(n), float(v)) for n, v in points)
    if len(pts) < 4:
        raise FitFailureError("need at least 4 points to fit a - b/(n - c)")
    ns = np.array([p[0] for p in pts])
    vs = np.array([p[1] for p in pts])
    if np.unique(ns).size != ns.size:
        raise FitFailureError("points must have distinct n values")

    c_max = ns.min() - 0.5

    def residuals(params):
        a, b, c = params
        return a - b / (ns - c) - vs

    x0 = np.array([vs.max(), 1.0, ns.min() - 1.0])
    fit = least_squares(
        residuals,
        x0,
        bounds=([-np.inf, -np.inf, -np.inf], [np.inf, np.inf, c_max]),
    )
    if not fit.success:
        raise FitFailureError(
            f"rational fit did not converge: {fit.message}; residuals {fit.fun}"
        )
    ss_res = float(np.sum(fit.fun**2))
    ss_tot = float(np.sum((vs - vs.mean()) ** 2))
    if ss_tot > 0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res < 1e-18 else 0.0
    a, b, c = (float(x) for x in fit.x)
    return RationalFit(a=a, b=b, c=c, r_squared=r2)


def verify_weenie_optimality(
    n: int,
    mesh_points: int,
    *,
    chunk_cells: int = 2_000_000,
) -> tuple[float, tuple[float, ...]]:
    """Scan the full coalition grid for the minimum of player-1's weenie
    payoff at the Nash threshold; returns (min value, argmin coalition
    tuple).  Nonnegative minima certify the equilibrium as strong."""
    if n < 2:
        raise InvalidProfileError("need at least 2 players")
    grid = make_grid(mesh_points)
    values = grid.as_array()
    p1 = nash_threshold(n, RuleVariant.WEENIE)
    m = n - 1
    total = mesh_points**m
    best = np.inf
    best_tuple = None
    rows_per_chunk = max(1, chunk_cells // max(1, mesh_points ** (m - 1)))

    idx = CoalitionIndex(coalition_size=m, base=mesh_points)
    start = 0
    block = rows_per_chunk * mesh_points ** (m - 1)
    while start < total:
        stop = min(total, start + block)
        cols = np.arange(start, stop)
        tuples = values[idx.decode_all(cols)]
        alpha = alpha_player1_many(p1, tuples, RuleVariant.WEENIE)
        k = int(alpha.argmin())
        if alpha[k] < best:
            best = float(alpha[k])
            best_tuple = tuple(float(v) for v in tuples[k])
        start = stop
    return best, best_tuple


def solve_two_vs_two(
    mesh_points: int,
    rule: RuleVariant = RuleVariant.STANDARD,
    *,
    seed: int = 0,
    tolerance: float = 1e-4,
    inner_max_iterations: int = 1_000_000,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> TwoCoalitionSolution:
    """Solve the 2-vs-2 coalition split of 4-player guts.

    Rows/columns index ordered pairs; pairs being interchangeable within a
    coalition, the solver works on the sorted-pair reduction and reports
    canonical supports.
    """
    grid = make_grid(mesh_points)
    values = grid.as_array()
    matrices = build_two_coalition_matrices(
        grid, rule, memory_budget=memory_budget
    )
    idx = CoalitionIndex(coalition_size=2, base=mesh_points)
    pairs = values[idx.decode_all(np.arange(idx.num_columns))]

    sorted_pairs = np.sort(pairs, axis=1)
    _, rep_idx, _ = np.unique(sorted_pairs, axis=0, return_index=True, return_inverse=True)
    reduced = StakedBimatrix(
        alpha=matrices.alpha[np.ix_(rep_idx, rep_idx)],
        beta=matrices.beta[np.ix_(rep_idx, rep_idx)],
    )
    red_pairs = sorted_pairs[rep_idx]

    config = ValueIterationConfig(
        tolerance=tolerance, seed=seed, inner_max_iterations=inner_max_iterations
    )
    spec = RecursiveGameSpec(matrices=reduced, termination_fee_t1=2.0)
    result = value_iteration(spec, config=config)

    row_support, _ = _decode_support(result.row_strategy, red_pairs)
    col_support, _ = _decode_support(result.col_strategy, red_pairs)
    return TwoCoalitionSolution(
        mesh_points=mesh_points,
        rule=rule,
        value=result.fixed_point,
        row_support=tuple(((t[0], t[1]), w) for t, w in row_support),
        col_support=tuple(((t[0], t[1]), w) for t, w in col_support),
        solve=result,
    )
