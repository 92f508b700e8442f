"""Shared domain types: strategy grid, mixed strategies, staked matrices,
and the flat column indexing scheme for coalition strategy tuples.

Strategies are identified by grid *indices* everywhere below the reporting
layer; real threshold values only appear when decoding results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GutslabError(Exception):
    """Base class for package errors."""


class InvalidDiscretizationError(GutslabError, ValueError):
    """Raised for mesh sizes that cannot represent a threshold grid."""


class InvalidProfileError(GutslabError, ValueError):
    """Raised for malformed threshold profiles."""


class InvalidInputError(GutslabError, ValueError):
    """Raised for malformed solver inputs (empty or mismatched matrices)."""


class ResourceBudgetError(GutslabError, RuntimeError):
    """Raised when a requested matrix would exceed the memory budget."""


class OracleScaleError(GutslabError, ValueError):
    """Raised when the exact minimax oracle is asked for an oversized game."""


@dataclass(frozen=True)
class Grid:
    """Uniform threshold grid on [0, 1] with inclusive endpoints.

    values[i] == i / (mesh_points - 1), strictly increasing, first value 0,
    last value 1.
    """

    mesh_points: int
    values: tuple[float, ...]

    def __len__(self) -> int:
        return self.mesh_points

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def nearest_index(self, x: float) -> int:
        """Index of the grid point closest to x."""
        return int(round(x * (self.mesh_points - 1)))


def make_grid(mesh_points: int) -> Grid:
    """Build the uniform grid with the given number of mesh points (M >= 2)."""
    if not isinstance(mesh_points, (int, np.integer)) or mesh_points < 2:
        raise InvalidDiscretizationError(
            f"mesh_points must be an integer >= 2, got {mesh_points!r}"
        )
    m = int(mesh_points)
    values = tuple(i / (m - 1) for i in range(m))
    return Grid(mesh_points=m, values=values)


@dataclass(frozen=True)
class MixedStrategy:
    """Probability vector over a pure-strategy index set."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise InvalidInputError("weights must be a nonempty 1-d sequence")
        if np.any(w < 0):
            raise InvalidInputError("mixed-strategy weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-9:
            raise InvalidInputError(
                f"mixed-strategy weights must sum to 1, got {w.sum()!r}"
            )

    @classmethod
    def from_weights(cls, weights) -> "MixedStrategy":
        """Normalize a nonnegative weight vector into a MixedStrategy."""
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if total <= 0:
            raise InvalidInputError("weight vector must have positive total mass")
        return cls(weights=tuple(w / total))

    @classmethod
    def pure(cls, index: int, size: int) -> "MixedStrategy":
        w = np.zeros(size)
        w[index] = 1.0
        return cls(weights=tuple(w))

    @classmethod
    def uniform(cls, size: int) -> "MixedStrategy":
        return cls(weights=tuple(np.full(size, 1.0 / size)))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def support(self, threshold: float = 0.0) -> list[int]:
        """Indices with weight strictly above threshold."""
        return [i for i, w in enumerate(self.weights) if w > threshold]

    def pruned(self, threshold: float) -> "MixedStrategy":
        """Drop weights <= threshold and renormalize the rest."""
        w = self.as_array()
        w[w <= threshold] = 0.0
        return MixedStrategy.from_weights(w)

    def as_index_map(self, threshold: float = 0.0) -> dict[int, float]:
        """Sparse index -> weight map over the support."""
        return {i: float(self.weights[i]) for i in self.support(threshold)}


@dataclass(frozen=True)
class StakedBimatrix:
    """Paired payoff/stakes matrices for player 1 vs a coalition.

    alpha[i, c]: player-1 expected one-shot payoff when playing row strategy i
    against coalition column c.  beta[i, c]: expected stakes multiplier for
    the same cell (nonnegative).  The coalition's payoff is -alpha (zero-sum).
    """

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float)
        b = np.asarray(self.beta, dtype=float)
        if a.shape != b.shape:
            raise InvalidInputError(
                f"alpha/beta shape mismatch: {a.shape} vs {b.shape}"
            )
        if a.ndim != 2 or a.size == 0:
            raise InvalidInputError("alpha/beta must be nonempty 2-d matrices")
        if np.any(b < 0):
            raise InvalidInputError("beta entries must be nonnegative")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def shape(self) -> tuple[int, int]:
        return self.alpha.shape

    def staked(self, v: float) -> np.ndarray:
        """The one-shot matrix A + B*v of the round played at value v."""
        return self.alpha + self.beta * v


@dataclass(frozen=True)
class CoalitionIndex:
    """Bijective packing of coalition strategy tuples into flat column ids.

    Tuple (j_1, ..., j_k) with 0 <= j_i < base maps to
    j_1 + j_2*base + ... + j_k*base^(k-1).
    """

    coalition_size: int
    base: int

    def __post_init__(self):
        if self.coalition_size < 1:
            raise InvalidInputError("coalition_size must be >= 1")
        if self.base < 1:
            raise InvalidInputError("base must be >= 1")

    @property
    def num_columns(self) -> int:
        return self.base**self.coalition_size

    def encode(self, indices: tuple[int, ...]) -> int:
        if len(indices) != self.coalition_size:
            raise IndexError(
                f"expected {self.coalition_size} indices, got {len(indices)}"
            )
        column = 0
        for i, j in enumerate(indices):
            if not 0 <= j < self.base:
                raise IndexError(f"strategy index {j} out of range [0, {self.base})")
            column += j * self.base**i
        return column

    def decode(self, column: int, position: int) -> int:
        """Strategy index of coalition member `position` (1-based)."""
        if not 0 <= column < self.num_columns:
            raise IndexError(f"column {column} out of range [0, {self.num_columns})")
        if not 1 <= position <= self.coalition_size:
            raise IndexError(
                f"position {position} out of range [1, {self.coalition_size}]"
            )
        return (column % self.base**position) // self.base ** (position - 1)

    def decode_tuple(self, column: int) -> tuple[int, ...]:
        return tuple(
            self.decode(column, pos) for pos in range(1, self.coalition_size + 1)
        )

    def decode_all(self, columns: np.ndarray) -> np.ndarray:
        """Vectorized decode: (len(columns), coalition_size) index array."""
        cols = np.asarray(columns, dtype=np.int64)
        out = np.empty((cols.size, self.coalition_size), dtype=np.int64)
        for pos in range(1, self.coalition_size + 1):
            out[:, pos - 1] = (cols % self.base**pos) // self.base ** (pos - 1)
        return out


def encode_column(indices: tuple[int, ...], idx: CoalitionIndex) -> int:
    """Flat column id of a coalition strategy tuple."""
    return idx.encode(indices)


def decode_column(column: int, position: int, idx: CoalitionIndex) -> int:
    """Inverse of encode_column for one member position (1-based)."""
    return idx.decode(column, position)
