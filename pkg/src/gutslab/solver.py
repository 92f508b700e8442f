"""Two-player zero-sum matrix game solving.

Fictitious play with duality-gap termination is the workhorse (the inner
loop is numba-compiled; it scales to the big guts matrices); support
enumeration provides an exact minimax oracle for small matrices.  Row
player maximizes, column player minimizes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numba
import numpy as np

from .core import InvalidInputError, MixedStrategy, OracleScaleError
from .rng import np_seed_to_u64, splitmix64_next


@dataclass(frozen=True)
class FPResult:
    """Outcome of one fictitious-play run.

    value_lower is min over columns of the returned row mixture's payoff
    (a guarantee for the row player), value_upper the max over rows against
    the returned column mixture, so the game value lies in
    [value_lower, value_upper].  The returned mixtures are the historical
    empirical strategies achieving each player's best bound so far, which
    makes the bracket monotone over the run.  bound_trace rows are
    (iteration, value_lower, value_upper) sampled every `trace_every`
    iterations plus the final one; plays is the optional (T, 2) record of
    pure choices.
    """

    empirical_row: MixedStrategy
    empirical_col: MixedStrategy
    value_lower: float
    value_upper: float
    bound_trace: np.ndarray
    iterations_used: int
    seed: int
    converged: bool
    plays: np.ndarray | None = None

    @property
    def gap(self) -> float:
        return self.value_upper - self.value_lower

    @property
    def value_midpoint(self) -> float:
        return 0.5 * (self.value_lower + self.value_upper)

    @property
    def gap_trace(self) -> list[tuple[int, float]]:
        return [(int(t), float(u - lo)) for t, lo, u in self.bound_trace]

    def to_jsonable(self, support_threshold: float = 0.0) -> dict:
        return {
            "row_strategy": {
                str(i): w
                for i, w in self.empirical_row.as_index_map(support_threshold).items()
            },
            "col_strategy": {
                str(i): w
                for i, w in self.empirical_col.as_index_map(support_threshold).items()
            },
            "value_lower": self.value_lower,
            "value_upper": self.value_upper,
            "gap_trace": [[int(t), float(u - lo)] for t, lo, u in self.bound_trace],
            "iterations_used": self.iterations_used,
            "seed": self.seed,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class MinimaxSolution:
    """Exact game value and optimal strategies from support enumeration."""

    value: float
    row_strategy: MixedStrategy
    col_strategy: MixedStrategy


def _as_matrix(A) -> np.ndarray:
    M = np.asarray(A, dtype=float)
    if M.ndim != 2 or M.size == 0:
        raise InvalidInputError("payoff matrix must be nonempty and 2-d")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError("payoff matrix must be finite")
    return M


@numba.njit(cache=True)
def _tie_pick(values, best, state):  # pragma: no cover - jitted
    """Index attaining `best`; uniform among ties (draws only when tied)."""
    count = 0
    first = -1
    for i in range(values.shape[0]):
        if values[i] == best:
            count += 1
            if first < 0:
                first = i
    if count == 1:
        return first, state
    state, z = splitmix64_next(state)
    target = z % numba.uint64(count)
    seen = numba.uint64(0)
    for i in range(values.shape[0]):
        if values[i] == best:
            if seen == target:
                return i, state
            seen += numba.uint64(1)
    return first, state  # unreachable


@numba.njit(cache=True)
def _fp_core(A, max_iterations, gap_tolerance, state, trace_every, record_plays):  # pragma: no cover
    m, n = A.shape
    row_counts = np.zeros(m)
    col_counts = np.zeros(n)
    row_payoff = np.zeros(m)  # A @ (col history)
    col_payoff = np.zeros(n)  # (row history) @ A
    best_row_counts = np.zeros(m)
    best_col_counts = np.zeros(n)

    state, z = splitmix64_next(state)
    row_play = numba.int64(z % numba.uint64(m))
    state, z = splitmix64_next(state)
    col_play = numba.int64(z % numba.uint64(n))

    max_trace = max_iterations // trace_every + 2
    trace = np.empty((max_trace, 3))
    n_trace = 0
    plays = np.empty((max_iterations if record_plays else 0, 2), dtype=np.int64)
    converged = False
    best_lower = -np.inf
    best_upper = np.inf
    t = 0
    while True:
        t += 1
        row_counts[row_play] += 1.0
        col_counts[col_play] += 1.0
        if record_plays:
            plays[t - 1, 0] = row_play
            plays[t - 1, 1] = col_play
        row_best = -np.inf
        for i in range(m):
            row_payoff[i] += A[i, col_play]
            if row_payoff[i] > row_best:
                row_best = row_payoff[i]
        col_best = np.inf
        for j in range(n):
            col_payoff[j] += A[row_play, j]
            if col_payoff[j] < col_best:
                col_best = col_payoff[j]
        # col_payoff/t is the row empirical's payoff per column and vice
        # versa; keep the best guarantees seen plus the mixtures behind them
        if col_best / t > best_lower:
            best_lower = col_best / t
            best_row_counts[:] = row_counts
        if row_best / t < best_upper:
            best_upper = row_best / t
            best_col_counts[:] = col_counts
        recorded = False
        if t % trace_every == 0 or t == max_iterations:
            trace[n_trace, 0] = t
            trace[n_trace, 1] = best_lower
            trace[n_trace, 2] = best_upper
            n_trace += 1
            recorded = True
        if best_upper - best_lower <= gap_tolerance:
            converged = True
            if not recorded:
                trace[n_trace, 0] = t
                trace[n_trace, 1] = best_lower
                trace[n_trace, 2] = best_upper
                n_trace += 1
            break
        if t >= max_iterations:
            break
        row_play, state = _tie_pick(row_payoff, row_best, state)
        col_play, state = _tie_pick(col_payoff, col_best, state)
    return (
        best_row_counts,
        best_col_counts,
        best_lower,
        best_upper,
        trace[:n_trace].copy(),
        t,
        converged,
        plays[:t],
    )


def fictitious_play(
    A,
    max_iterations: int = 1_000_000,
    gap_tolerance: float = 1e-3,
    seed: int = 0,
    trace_every: int = 1,
    record_plays: bool = False,
) -> FPResult:
    """Simultaneous-update discrete fictitious play.

    Each step both players add a pure best response to the opponent's
    empirical play so far; ties are broken uniformly at random from the
    run's seed, and the first play of each side is a uniformly random pure
    strategy.  Stops when value_upper - value_lower <= gap_tolerance or at
    the iteration cap (then flagged non-converged).
    """
    M = np.ascontiguousarray(_as_matrix(A))
    if max_iterations < 1:
        raise InvalidInputError("max_iterations must be >= 1")
    if trace_every < 1:
        raise InvalidInputError("trace_every must be >= 1")
    row_counts, col_counts, lower, upper, trace, t, converged, plays = _fp_core(
        M, max_iterations, gap_tolerance, np_seed_to_u64(seed), trace_every, record_plays
    )
    return FPResult(
        empirical_row=MixedStrategy.from_weights(row_counts),
        empirical_col=MixedStrategy.from_weights(col_counts),
        value_lower=float(lower),
        value_upper=float(upper),
        bound_trace=trace,
        iterations_used=int(t),
        seed=seed,
        converged=bool(converged),
        plays=plays if record_plays else None,
    )


def duality_gap(A, row: MixedStrategy, col: MixedStrategy) -> float:
    """max_p phi(p, col) - min_q phi(row, q); zero exactly at saddle points."""
    M = _as_matrix(A)
    x = row.as_array()
    y = col.as_array()
    if x.size != M.shape[0] or y.size != M.shape[1]:
        raise InvalidInputError(
            f"strategy sizes {x.size}/{y.size} do not match matrix {M.shape}"
        )
    return float((M @ y).max() - (x @ M).min())


def exact_minimax(A, check_tolerance: float = 1e-9) -> MinimaxSolution:
    """Exact minimax value of a small matrix game via support enumeration.

    For each equal-size support pair, solves the indifference systems and
    keeps the first pair passing nonnegativity and best-response checks;
    a square kernel of this kind always exists for matrix games.
    """
    M = _as_matrix(A)
    m, n = M.shape
    if min(m, n) > 8:
        raise OracleScaleError(
            f"support-enumeration oracle limited to min(rows, cols) <= 8, got {M.shape}"
        )
    for k in range(1, min(m, n) + 1):
        rhs = np.zeros(k + 1)
        rhs[k] = 1.0
        for rows in itertools.combinations(range(m), k):
            sub_rows = M[list(rows), :]
            for cols in itertools.combinations(range(n), k):
                sub = sub_rows[:, list(cols)]
                sol = _solve_support(sub, rhs)
                if sol is None:
                    continue
                x_sub, y_sub, value = sol
                x = np.zeros(m)
                x[list(rows)] = x_sub
                y = np.zeros(n)
                y[list(cols)] = y_sub
                if (x @ M).min() < value - check_tolerance:
                    continue
                if (M @ y).max() > value + check_tolerance:
                    continue
                return MinimaxSolution(
                    value=float(value),
                    row_strategy=MixedStrategy.from_weights(x),
                    col_strategy=MixedStrategy.from_weights(y),
                )
    raise RuntimeError("support enumeration found no kernel; matrix may be ill-posed")


def _solve_support(sub: np.ndarray, rhs: np.ndarray):
    """Solve the two indifference systems on a k x k support pair."""
    k = sub.shape[0]
    sys_x = np.zeros((k + 1, k + 1))
    sys_x[:k, :k] = sub.T
    sys_x[:k, k] = -1.0
    sys_x[k, :k] = 1.0
    sys_y = np.zeros((k + 1, k + 1))
    sys_y[:k, :k] = sub
    sys_y[:k, k] = -1.0
    sys_y[k, :k] = 1.0
    try:
        sol_x = np.linalg.solve(sys_x, rhs)
        sol_y = np.linalg.solve(sys_y, rhs)
    except np.linalg.LinAlgError:
        return None
    x, vx = sol_x[:k], sol_x[k]
    y, vy = sol_y[:k], sol_y[k]
    if abs(vx - vy) > 1e-9:
        return None
    if x.min() < -1e-12 or y.min() < -1e-12:
        return None
    return np.clip(x, 0.0, None), np.clip(y, 0.0, None), 0.5 * (vx + vy)
