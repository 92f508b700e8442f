"""Fixed-point iteration of the value map T(V) = Value(A + B V), with
runtime verification of the transition criterion, the geometric convergence
rate, and attraction from above.

V_0 = -t1 (the fee player 1 forfeits by quitting); V_{n+1} applies the
inner zero-sum solver to the staked matrix A + B V_n.  With B >= 0 the
sequence is monotone once it moves up, so it either converges to the least
fixed point or overshoots past the divergence ceiling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GutslabError, MixedStrategy, StakedBimatrix
from .solver import FPResult, fictitious_play


class OvershootDivergenceError(GutslabError, RuntimeError):
    """Value iteration exceeded the divergence ceiling; carries the trace."""

    def __init__(self, message: str, trace: list[float]):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class RecursiveGameSpec:
    """A single-state recursive game: staked matrices plus termination fees.

    termination_fee_t1: amount player 1 forfeits to quit (V0 = -t1).
    termination_fee_t2: cap on the value player 1 can force (what the
    opponent would forfeit instead of playing); +inf disables the cap.
    """

    matrices: StakedBimatrix
    termination_fee_t1: float = 1.0
    termination_fee_t2: float = math.inf


@dataclass(frozen=True)
class RecursiveSolveResult:
    fixed_point: float
    trace: tuple[float, ...]
    row_strategy: MixedStrategy
    col_strategy: MixedStrategy
    converged: bool
    capped_by_t2: bool
    final_solve: FPResult
    step_gaps: tuple[float, ...] = ()  # inner duality gap behind each V_n, n >= 1

    @property
    def iterations(self) -> int:
        return len(self.trace) - 1

    def trace_rows(self):
        """(n, V_n, inner_gap_n) rows; the start value has no inner solve."""
        rows = [(0, self.trace[0], None)]
        for i, v in enumerate(self.trace[1:], start=1):
            gap = self.step_gaps[i - 1] if i - 1 < len(self.step_gaps) else None
            rows.append((i, v, gap))
        return rows


@dataclass(frozen=True)
class TransitionCheck:
    """Evaluation of the transition criterion for a fixed player-1 strategy:
    min over columns of alpha + beta*V must exceed V at v_star and reach it
    at v_upper, which pins the limiting value at or above v_upper."""

    strategy: MixedStrategy
    v_star: float
    v_upper: float
    epsilon: float
    holds: bool

    def to_jsonable(self) -> dict:
        return {
            "strategy": self.strategy.as_index_map(1e-12),
            "v_star": self.v_star,
            "v_upper": self.v_upper,
            "epsilon": self.epsilon,
            "holds": self.holds,
        }


@dataclass
class ValueIterationConfig:
    tolerance: float = 1e-4
    max_iterations: int = 200
    inner_max_iterations: int = 1_000_000
    divergence_ceiling: float = 1e6
    seed: int = 0
    start_at_zero: bool = False  # start V0 = 0 instead of -t1

    @property
    def inner_gap_tolerance(self) -> float:
        # Value() error propagates linearly through B, so the inner solver
        # runs one order tighter than the outer stopping rule.
        return self.tolerance / 10.0


def _inner_seed(base_seed: int, step: int) -> int:
    return int(
        np.random.SeedSequence(entropy=base_seed, spawn_key=(step + 1,)).generate_state(1)[0]
    )


def _value_of(
    matrices: StakedBimatrix, v: float, config: ValueIterationConfig, step: int
) -> FPResult:
    return fictitious_play(
        matrices.staked(v),
        max_iterations=config.inner_max_iterations,
        gap_tolerance=config.inner_gap_tolerance,
        seed=_inner_seed(config.seed, step),
        trace_every=max(1, config.inner_max_iterations // 100),
    )


def value_iteration(
    spec: RecursiveGameSpec,
    tolerance: float = 1e-4,
    max_iterations: int = 200,
    config: ValueIterationConfig | None = None,
) -> RecursiveSolveResult:
    """Iterate V_{n+1} = Value(A + B V_n) from V_0 = -t1 to the fixed point.

    Returns min(limit, t2) with capped_by_t2 set when the cap binds.  If the
    first step does not improve on -t1, player 1 should not enter and -t1 is
    returned immediately.  Divergence past the ceiling raises
    OvershootDivergenceError carrying the trace.
    """
    if config is None:
        config = ValueIterationConfig(tolerance=tolerance, max_iterations=max_iterations)
    v0 = 0.0 if config.start_at_zero else -spec.termination_fee_t1
    trace = [v0]
    step_gaps = []
    v = v0
    converged = False
    last = None
    for step in range(config.max_iterations):
        last = _value_of(spec.matrices, v, config, step)
        v_next = last.value_midpoint
        trace.append(v_next)
        step_gaps.append(last.gap)
        if step == 0 and v_next <= v0 and not config.start_at_zero:
            # not worth entering: quitting immediately is at least as good
            v = v0
            converged = True
            break
        if v_next > config.divergence_ceiling:
            raise OvershootDivergenceError(
                f"value iteration exceeded ceiling {config.divergence_ceiling:g} "
                f"after {step + 1} steps",
                trace,
            )
        if abs(v_next - v) <= config.tolerance:
            v = v_next
            converged = True
            break
        v = v_next

    capped = False
    if v > spec.termination_fee_t2:
        v = spec.termination_fee_t2
        capped = True
    final = _value_of(spec.matrices, v, config, step=-1)
    return RecursiveSolveResult(
        fixed_point=float(v),
        trace=tuple(trace),
        row_strategy=final.empirical_row,
        col_strategy=final.empirical_col,
        converged=converged,
        capped_by_t2=capped,
        final_solve=final,
        step_gaps=tuple(step_gaps),
    )


def restricted_payoffs(
    matrices: StakedBimatrix, strategy: MixedStrategy
) -> tuple[np.ndarray, np.ndarray]:
    """Per-column (alpha, beta) of the game with player 1 pinned to a mixed
    strategy: the restricted game is 1 x columns."""
    x = strategy.as_array()
    return x @ matrices.alpha, x @ matrices.beta


def restricted_value_iteration(
    matrices: StakedBimatrix,
    strategy: MixedStrategy,
    v0: float,
    steps: int,
) -> list[float]:
    """Trace of V_{n+1} = min over columns of alpha_S + beta_S * V_n under a
    fixed player-1 strategy (the opponent simply minimizes)."""
    alpha_s, beta_s = restricted_payoffs(matrices, strategy)
    trace = [v0]
    v = v0
    for _ in range(steps):
        v = float((alpha_s + beta_s * v).min())
        trace.append(v)
    return trace


def check_transition(
    spec: RecursiveGameSpec,
    strategy: MixedStrategy,
    v_star: float,
    v_upper: float,
) -> TransitionCheck:
    """Transition criterion for a fixed player-1 strategy on [v_star, v_upper]:
    strict improvement at v_star and non-decrease at v_upper imply repeated
    play forces a limit >= v_upper from any start in the interval."""
    alpha_s, beta_s = restricted_payoffs(spec.matrices, strategy)
    at_star = float((alpha_s + beta_s * v_star).min()) - v_star
    at_upper = float((alpha_s + beta_s * v_upper).min()) - v_upper
    holds = at_star > 0.0 and at_upper >= 0.0
    if v_star == v_upper:
        holds = at_star >= 0.0
    return TransitionCheck(
        strategy=strategy,
        v_star=v_star,
        v_upper=v_upper,
        epsilon=at_star,
        holds=holds,
    )


def geometric_bound(epsilon: float, v_star: float, v_upper: float, n: int) -> float:
    """Rate bound (1 - eps)^n * (v_upper - v_star) on v_upper - V_n."""
    if not 0.0 < epsilon < 1.0:
        raise GutslabError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if v_star > v_upper:
        raise GutslabError("v_star must not exceed v_upper")
    return (1.0 - epsilon) ** n * (v_upper - v_star)


def check_attraction_above(
    spec: RecursiveGameSpec,
    fixed_point: float,
    probe_offsets,
    config: ValueIterationConfig | None = None,
) -> tuple[bool, list[tuple[float, float]]]:
    """Probe T just above the fixed point: attraction holds when
    T(V + delta) - (V + delta) < 0 for every probe offset delta.

    Returns (attracting, [(delta, margin), ...]); margin/delta ratios are
    empirical attraction constants.
    """
    if config is None:
        config = ValueIterationConfig()
    margins = []
    attracting = True
    for step, delta in enumerate(probe_offsets):
        if delta <= 0:
            raise GutslabError("probe offsets must be positive")
        v = fixed_point + delta
        result = _value_of(spec.matrices, v, config, step=1000 + step)
        margin = result.value_midpoint - v
        margins.append((float(delta), float(margin)))
        if margin >= 0.0:
            attracting = False
    return attracting, margins


def fixed_points_of_max_lines(alphas, betas) -> list[float]:
    """All fixed points of T(V) = max_i (alpha_i + beta_i V), the m x 1 game
    where only player 1 chooses.

    Exploratory helper for the fixed-point taxonomy: solves each line's
    crossing alpha_i + beta_i V = V and keeps those where the line attains
    the max.  At most two isolated crossings exist (slope < 1 then >= 1)
    unless some beta_i = 1 produces a neutral segment.
    """
    a = np.asarray(alphas, dtype=float)
    b = np.asarray(betas, dtype=float)
    found = []
    for ai, bi in zip(a, b):
        if bi == 1.0:
            if ai == 0.0:
                found.append(0.0)  # representative of a neutral line
            continue
        v = ai / (1.0 - bi)
        if abs((a + b * v).max() - v) <= 1e-9 * max(1.0, abs(v)):
            found.append(float(v))
    return sorted(set(round(v, 12) for v in found))
