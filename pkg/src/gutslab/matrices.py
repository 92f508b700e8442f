"""Construction of player-1-vs-coalition payoff/stakes matrices.

Rows index player 1's grid threshold; columns index coalition strategy
tuples packed by CoalitionIndex.  Cells are filled by the exact vectorized
player-1 evaluators, which agree with the reference enumeration to ~1e-15.
"""

from __future__ import annotations

import concurrent.futures
import os
import struct

import numpy as np

from .core import (
    CoalitionIndex,
    Grid,
    InvalidProfileError,
    ResourceBudgetError,
    StakedBimatrix,
)
from .payoff import RuleVariant, alpha_player1_many, beta_many

DEFAULT_MEMORY_BUDGET = 2 * 1024**3  # bytes, both matrices together

_MAGIC = b"GLM1"


def _check_budget(rows: int, cols: int, memory_budget: int):
    cells = rows * cols
    required = 2 * 8 * cells  # alpha + beta, float64
    if required > memory_budget:
        raise ResourceBudgetError(
            f"matrix of {rows} x {cols} = {cells} cells needs {required} bytes "
            f"(budget {memory_budget}); raise the budget to proceed"
        )


def _fill(
    thresholds: np.ndarray,
    coalition_tuples: np.ndarray,
    rule: RuleVariant,
    threads: int | None = None,
) -> StakedBimatrix:
    """Evaluate alpha/beta for every (row threshold, coalition tuple) cell."""
    rows = thresholds.size
    tuples_sorted = np.sort(coalition_tuples, axis=1)
    alpha = np.empty((rows, coalition_tuples.shape[0]))
    beta = np.empty_like(alpha)

    def fill_row(i: int):
        a = float(thresholds[i])
        alpha[i] = alpha_player1_many(a, tuples_sorted, rule, opponents_sorted=True)
        beta[i] = beta_many(a, tuples_sorted, rule)

    workers = threads if threads is not None else (os.cpu_count() or 1)
    if workers > 1 and rows > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_row, range(rows)))
    else:
        for i in range(rows):
            fill_row(i)
    return StakedBimatrix(alpha=alpha, beta=beta)


def build_full_matrices(
    n: int,
    grid: Grid,
    rule: RuleVariant = RuleVariant.STANDARD,
    *,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    threads: int | None = None,
) -> StakedBimatrix:
    """M x M^(n-1) matrices over all coalition tuples (independent members)."""
    if n < 2:
        raise InvalidProfileError("need at least 2 players")
    m = grid.mesh_points
    idx = CoalitionIndex(coalition_size=n - 1, base=m)
    _check_budget(m, idx.num_columns, memory_budget)
    values = grid.as_array()
    tuples = values[idx.decode_all(np.arange(idx.num_columns))]
    return _fill(values, tuples, rule, threads)


def build_pseudo_bloc_matrices(
    n: int,
    grid: Grid,
    rule: RuleVariant = RuleVariant.STANDARD,
    *,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    threads: int | None = None,
) -> StakedBimatrix:
    """M x M^2 matrices; column (j1, j2) = player 2 at grid[j1], players
    3..n bloc at grid[j2]."""
    if n < 3:
        raise InvalidProfileError("pseudo-bloc coalitions need n >= 3 players")
    m = grid.mesh_points
    idx = CoalitionIndex(coalition_size=2, base=m)
    _check_budget(m, idx.num_columns, memory_budget)
    values = grid.as_array()
    pairs = values[idx.decode_all(np.arange(idx.num_columns))]
    tuples = np.empty((idx.num_columns, n - 1))
    tuples[:, 0] = pairs[:, 0]
    tuples[:, 1:] = pairs[:, 1:2]  # bloc threshold repeated n-2 times
    return _fill(values, tuples, rule, threads)


def build_bloc_matrices(
    n: int,
    grid: Grid,
    rule: RuleVariant = RuleVariant.STANDARD,
    *,
    threads: int | None = None,
) -> StakedBimatrix:
    """M x M matrices with the whole coalition restricted to one threshold."""
    if n < 2:
        raise InvalidProfileError("need at least 2 players")
    values = grid.as_array()
    tuples = np.repeat(values[:, None], n - 1, axis=1)
    return _fill(values, tuples, rule, threads)


def build_two_coalition_matrices(
    grid: Grid,
    rule: RuleVariant = RuleVariant.STANDARD,
    *,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    threads: int | None = None,
) -> StakedBimatrix:
    """2-vs-2 game: rows and columns are coalition pairs (M^2 each).

    alpha[r, c] is the joint payoff of the row pair; beta the shared stakes
    multiplier of the 4-player profile.
    """
    m = grid.mesh_points
    idx = CoalitionIndex(coalition_size=2, base=m)
    cols = idx.num_columns
    _check_budget(cols, cols, memory_budget)
    values = grid.as_array()
    pairs = values[idx.decode_all(np.arange(cols))]

    alpha = np.empty((cols, cols))
    beta = np.empty_like(alpha)

    def fill_row(r: int):
        a1, a2 = pairs[r]
        # opponents of player a1: (a2, b1, b2); of player a2: (a1, b1, b2)
        opp1 = np.empty((cols, 3))
        opp1[:, 0] = a2
        opp1[:, 1:] = pairs
        opp2 = np.empty((cols, 3))
        opp2[:, 0] = a1
        opp2[:, 1:] = pairs
        alpha[r] = alpha_player1_many(a1, opp1, rule) + alpha_player1_many(
            a2, opp2, rule
        )
        beta[r] = beta_many(a1, opp1, rule)

    workers = threads if threads is not None else (os.cpu_count() or 1)
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_row, range(cols)))
    else:
        for r in range(cols):
            fill_row(r)
    return StakedBimatrix(alpha=alpha, beta=beta)


# ---------------------------------------------------------------------------
# Export formats
# ---------------------------------------------------------------------------


def write_matrix_binary(path, matrix: np.ndarray, mesh_points: int, n: int, rule: RuleVariant):
    """Row-major little-endian float64 dump with a 16-byte header:
    magic 'GLM1', uint32 M, uint32 n, uint32 rule (0 standard / 1 weenie)."""
    header = _MAGIC + struct.pack(
        "<III", mesh_points, n, 1 if rule is RuleVariant.WEENIE else 0
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(matrix, dtype="<f8").tobytes())


def read_matrix_binary(path, shape=None):
    """Inverse of write_matrix_binary; returns (matrix, M, n, rule)."""
    with open(path, "rb") as fh:
        header = fh.read(16)
        if header[:4] != _MAGIC:
            raise ValueError(f"not a gutslab matrix file: {path}")
        mesh_points, n, rule_flag = struct.unpack("<III", header[4:])
        data = np.frombuffer(fh.read(), dtype="<f8")
    rule = RuleVariant.WEENIE if rule_flag else RuleVariant.STANDARD
    if shape is not None:
        data = data.reshape(shape)
    return data, mesh_points, n, rule


def write_matrix_csv(path, matrix: np.ndarray):
    """Plain CSV for small instances ('.' decimal, full precision)."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in np.atleast_2d(matrix):
            fh.write(",".join(repr(float(x)) for x in row))
            fh.write("\n")
