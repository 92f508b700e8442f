"""Discrete n-player fictitious play with per-iteration duality gap, the
appendix example games (Jacob I/II/mega, odd-man-in/out), and their exact
evaluations.

Each player best-responds to the product of the other players' empirical
distributions (simultaneous updates, random tie-breaks).  The duality gap
g(t) sums every player's best-response advantage and vanishes exactly at
Nash equilibria of the symmetric zero-sum game.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import InvalidInputError, MixedStrategy, make_grid
from .payoff import RuleVariant, alpha_for_rule
from .rng import SplitMix64


class SymmetricGame:
    """Symmetric zero-sum n-player game given by per-strategy payoff tensors.

    payoff_tensors[s] is the (k, ..., k) array (one axis per opponent) of
    the payoff to a player choosing pure strategy s while the ordered
    opponents play the axis indices.  Symmetry of each tensor under
    opponent permutation makes the by-symmetry payoffs of the other
    players consistent.
    """

    def __init__(self, n: int, payoff_tensors: np.ndarray, name: str = ""):
        tensors = np.asarray(payoff_tensors, dtype=float)
        if tensors.ndim != n:
            raise InvalidInputError(
                f"expected one tensor axis per player, got shape {tensors.shape}"
            )
        self.n = n
        self.strategy_count = tensors.shape[0]
        self.tensors = tensors
        self.name = name

    def payoff_pure(self, own: int, others: tuple[int, ...]) -> float:
        """Payoff to a player choosing `own` against ordered opponent pures."""
        return float(self.tensors[(own, *others)])

    def profile_payoffs(self, profile: tuple[int, ...]) -> list[float]:
        """Payoffs to all players of a pure strategy profile (by symmetry)."""
        out = []
        for j in range(self.n):
            others = profile[:j] + profile[j + 1 :]
            out.append(self.payoff_pure(profile[j], others))
        return out

    def expected_payoffs(self, others: list[np.ndarray]) -> np.ndarray:
        """Expected payoff of each own pure strategy against independent
        opponent mixtures (ordered)."""
        out = self.tensors
        for dist in others[::-1]:
            out = out @ dist
        return out

    def expected_payoffs_all(self, dists: list[np.ndarray]) -> list[np.ndarray]:
        """Best-response scan vectors for every player at once."""
        return [
            self.expected_payoffs([dists[i] for i in range(self.n) if i != j])
            for j in range(self.n)
        ]


class GutsOneShotGame(SymmetricGame):
    """One-shot n-player guts alpha game on a threshold grid.

    Stores no tensor; expected payoffs against independent opponent
    mixtures factor through g_j(x) = E[max(Q_j, x)] and h_j(x) =
    E[min(Q_j, x)], so a best-response scan over the whole grid costs
    O(n * M) per iteration instead of a tensor contraction.
    """

    def __init__(
        self,
        n: int,
        mesh_points: int,
        rule: RuleVariant = RuleVariant.STANDARD,
        values=None,
    ):
        self.n = n
        self.rule = rule
        if values is None:
            self.values = make_grid(mesh_points).as_array()
        else:
            self.values = np.sort(np.asarray(values, dtype=float))
        self.strategy_count = self.values.size
        self.name = f"guts-{n}p-m{self.strategy_count}-{rule.value}"
        self._max_outer = np.maximum.outer(self.values, self.values)
        # products of n-1 piecewise-linear factors are piecewise polynomials
        # of degree n-1, integrated exactly per grid segment
        npts = (n - 1) // 2 + 1
        self._gauss = np.polynomial.legendre.leggauss(npts)

    def _g_of(self, dist: np.ndarray) -> np.ndarray:
        """g(x_i) = E[max(Q, x_i)] on the grid for mixture dist."""
        return self._max_outer @ dist

    def _segment_integrals(self, factors: list[np.ndarray]) -> np.ndarray:
        """Exact per-segment integral of the product of piecewise-linear
        factors given by their grid values."""
        x = self.values
        lo, hi = x[:-1], x[1:]
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        nodes, weights = self._gauss
        seg = np.zeros_like(lo)
        for nd, w in zip(nodes, weights):
            frac = 0.5 * (1.0 + nd)
            val = np.full_like(lo, w)
            for f in factors:
                val *= f[:-1] * (1 - frac) + f[1:] * frac
            seg += val
        return seg * half

    def expected_payoffs(self, others: list[np.ndarray]) -> np.ndarray:
        x = self.values
        n = self.n
        means = [float(d @ x) for d in others]
        gs = [self._g_of(d) for d in others]
        prod_mean = float(np.prod(means))

        seg = self._segment_integrals(gs)
        tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])

        hold_sum = (1.0 - x) + sum(1.0 - m for m in means)
        alpha = (
            hold_sum
            - 2.0 * (1.0 - x * prod_mean)
            - n * (1.0 - x)
            + 2.0 * n * tail
        )
        if self.rule is RuleVariant.WEENIE:
            # E[min(Q, x)] = mean + x - E[max(Q, x)]
            hs = [m + x - g for m, g in zip(means, gs)]
            seg_w = self._segment_integrals(hs)
            head = np.concatenate([[0.0], np.cumsum(seg_w)])
            alpha += x * prod_mean - n * head
        return alpha

    def payoff_pure(self, own: int, others: tuple[int, ...]) -> float:
        profile = (self.values[own],) + tuple(self.values[list(others)])
        return alpha_for_rule(profile, self.rule)[0]

    def expected_payoffs_all(self, dists: list[np.ndarray]) -> list[np.ndarray]:
        """One g per player, reused across the n best-response scans."""
        x = self.values
        n = self.n
        means = [float(d @ x) for d in dists]
        gs = [self._g_of(d) for d in dists]
        out = []
        for j in range(n):
            o_means = means[:j] + means[j + 1 :]
            o_gs = gs[:j] + gs[j + 1 :]
            prod_mean = float(np.prod(o_means))
            seg = self._segment_integrals(o_gs)
            tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
            hold_sum = (1.0 - x) + sum(1.0 - m for m in o_means)
            alpha = (
                hold_sum
                - 2.0 * (1.0 - x * prod_mean)
                - n * (1.0 - x)
                + 2.0 * n * tail
            )
            if self.rule is RuleVariant.WEENIE:
                o_hs = [m + x - g for m, g in zip(o_means, o_gs)]
                seg_w = self._segment_integrals(o_hs)
                head = np.concatenate([[0.0], np.cumsum(seg_w)])
                alpha += x * prod_mean - n * head
            out.append(alpha)
        return out


@dataclass(frozen=True)
class MultiFPTrace:
    """History of one multiplayer fictitious-play run.

    plays[t, j] is player j's pure choice at iteration t+1 (empirical
    distributions at any iteration are recoverable from the prefix);
    distributions are the final empiricals.  gap_trace rows are
    (iteration, g, G = iteration * g); realized[t, j] the payoff of the
    played profile.
    """

    plays: np.ndarray
    distributions: tuple[MixedStrategy, ...]
    gap_trace: np.ndarray
    realized: np.ndarray
    seed: int

    @property
    def iterations(self) -> int:
        return self.plays.shape[0]

    def final_plays(self) -> tuple[int, ...]:
        return tuple(int(s) for s in self.plays[-1])

    def plays_converged(self, window_fraction: float = 0.25, step: float = 0.0) -> bool:
        """True when each player's plays over the last window stay within
        `step` of a common per-player value."""
        t = self.plays.shape[0]
        w = max(1, int(t * window_fraction))
        tail = self.plays[-w:]
        return bool(np.all(tail.max(axis=0) - tail.min(axis=0) <= step))


def gap_n(game: SymmetricGame, distributions: list[MixedStrategy] | list[np.ndarray]) -> float:
    """Duality gap: sum over players of their best-response value against
    the others' product mixture.  Nonnegative; zero iff Nash."""
    dists = [
        d.as_array() if isinstance(d, MixedStrategy) else np.asarray(d, dtype=float)
        for d in distributions
    ]
    if len(dists) != game.n:
        raise InvalidInputError(f"need {game.n} distributions, got {len(dists)}")
    for d in dists:
        if d.size != game.strategy_count:
            raise InvalidInputError("distribution size does not match the game")
    total = 0.0
    for j in range(game.n):
        others = dists[:j] + dists[j + 1 :]
        total += float(game.expected_payoffs(others).max())
    return total


def multiplayer_fp(game: SymmetricGame, iterations: int, seed: int = 0) -> MultiFPTrace:
    """Simultaneous n-player fictitious play.

    Every player starts from a uniformly random pure strategy and then
    best-responds to the product of the other players' empirical
    distributions, ties broken uniformly at random; per-iteration duality
    gaps are recorded.  With n = 2 this reproduces the matrix solver's run
    exactly for the same seed.
    """
    if iterations < 1:
        raise InvalidInputError("iterations must be >= 1")
    n, k = game.n, game.strategy_count
    rng = SplitMix64(seed)
    counts = np.zeros((n, k))
    plays = np.empty((iterations, n), dtype=np.int64)
    realized = np.empty((iterations, n))
    gaps = np.empty((iterations, 3))

    current = [rng.randint(k) for _ in range(n)]
    cumulative = np.zeros((n, k))  # per player: sum over t of payoff vector

    use_cumulative = n == 2  # vs a single opponent the expectation telescopes

    for t in range(1, iterations + 1):
        for j in range(n):
            counts[j, current[j]] += 1.0
        plays[t - 1] = current
        profile = tuple(current)
        payoffs = game.profile_payoffs(profile)
        realized[t - 1] = payoffs

        best_values = np.empty(n)
        next_plays = list(current)
        if use_cumulative:
            for j in range(n):
                other = current[1 - j]
                if isinstance(game, GutsOneShotGame):
                    vec = game.expected_payoffs(
                        [_point_mass(other, k)]
                    )
                else:
                    vec = game.tensors[:, other]
                cumulative[j] += vec
                scan = cumulative[j]
                best = scan.max()
                best_values[j] = best / t
                next_plays[j] = _tie_break(scan, best, rng)
        else:
            dists = counts / t
            scans = game.expected_payoffs_all(list(dists))
            for j in range(n):
                scan = scans[j]
                best = scan.max()
                best_values[j] = best
                next_plays[j] = _tie_break(scan, best, rng)

        g = float(best_values.sum())
        gaps[t - 1] = (t, g, t * g)
        current = next_plays

    dists = tuple(MixedStrategy.from_weights(counts[j]) for j in range(n))
    return MultiFPTrace(
        plays=plays,
        distributions=dists,
        gap_trace=gaps,
        realized=realized,
        seed=seed,
    )


def _point_mass(index: int, size: int) -> np.ndarray:
    v = np.zeros(size)
    v[index] = 1.0
    return v


def _tie_break(values: np.ndarray, best: float, rng: SplitMix64) -> int:
    ties = np.flatnonzero(values == best)
    if ties.size == 1:
        return int(ties[0])
    return int(ties[rng.randint(ties.size)])


# ---------------------------------------------------------------------------
# Jacob games
# ---------------------------------------------------------------------------


def jacob_game() -> SymmetricGame:
    """Choose 1 or 2; a matched pair pays its number each to the odd player.

    Strategy index 0 = choose 1, index 1 = choose 2.
    """
    t = np.zeros((2, 2, 2))
    # own = 1: others (1,2) or (2,1) -> pay 1; others (2,2) -> collect 4
    t[0] = [[0.0, -1.0], [-1.0, 4.0]]
    # own = 2: others (1,1) -> collect 2; others with one 1 -> pay 2
    t[1] = [[2.0, -2.0], [-2.0, 0.0]]
    return SymmetricGame(3, t, name="jacob")


def jacob_game_ii() -> SymmetricGame:
    """Three-strategy variant with a winning coalition equilibrium
    (each player j choosing strategy j)."""
    t = np.empty((3, 3, 3))
    t[0] = [[0, 0, 0], [0, 0, -2], [0, -2, 0]]
    t[1] = [[0, 0, 1], [0, 0, -4], [1, -4, 16]]
    t[2] = [[0, 1, 0], [1, 8, -8], [0, -8, 0]]
    return SymmetricGame(3, t, name="jacob-ii")


def jacob_game_mega() -> SymmetricGame:
    """Six-strategy doubling of Jacob II: two copies of the coalition
    structure, with cross-block transfers."""
    t = np.empty((6, 6, 6))
    j2 = jacob_game_ii().tensors
    for s in range(3):
        t[s, :3, :3] = j2[s]
        t[s, 3:, 3:] = -4.0
        t[s, :3, 3:] = 2.0
        t[s, 3:, :3] = 2.0
        t[s + 3, :3, :3] = -4.0
        t[s + 3, 3:, 3:] = j2[s]
        t[s + 3, :3, 3:] = 2.0
        t[s + 3, 3:, :3] = 2.0
    return SymmetricGame(3, t, name="jacob-mega")


# ---------------------------------------------------------------------------
# Odd man in / out
# ---------------------------------------------------------------------------


class OddManVariant(Enum):
    IN = "in"  # the odd player collects
    OUT = "out"  # the odd player pays


def odd_man_payoff(
    variant: OddManVariant, y, z
) -> tuple[tuple[float, float, float], float]:
    """Player-1 payoffs per pure choice against independent mixtures (y, z)
    of players 2 and 3, and their max (the value player 1 can force).

    In variant: Psi_j = 2 y.z - (y_j + z_j); Out negates it.
    """
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if y.shape != (3,) or z.shape != (3,):
        raise InvalidInputError("odd-man mixtures live on the 3-simplex")
    dot = float(y @ z)
    psi = tuple(2.0 * dot - (y[j] + z[j]) for j in range(3))
    if variant is OddManVariant.OUT:
        psi = tuple(-v for v in psi)
    return psi, max(psi)


def odd_man_synchronous_value(variant: OddManVariant) -> float:
    """Value forced by the optimal synchronized coalition blend: distinct
    pairs for In, matched pairs for Out; -2/3 either way."""
    return -2.0 / 3.0


def simplex_grid(resolution: int) -> np.ndarray:
    """All weight vectors (i/r, j/r, k/r) with i+j+k = r."""
    pts = []
    for i in range(resolution + 1):
        for j in range(resolution + 1 - i):
            pts.append((i, j, resolution - i - j))
    return np.asarray(pts, dtype=float) / resolution


def odd_man_search(variant: OddManVariant, resolution: int = 50):
    """Brute-force scan of product mixtures on the simplex pair.

    Returns (min over (y, z) of max_j Psi_j, argmin (y, z), synchronous
    benchmark value).  Exact at the known optima when resolution is even.
    """
    if resolution < 10:
        raise InvalidInputError("resolution must be >= 10")
    pts = simplex_grid(resolution)
    dots = pts @ pts.T  # y.z for all pairs
    worst = None
    best_pair = None
    for j in range(3):
        comp = np.add.outer(pts[:, j], pts[:, j])
        psi_j = 2.0 * dots - comp
        if variant is OddManVariant.OUT:
            psi_j = -psi_j
        worst = psi_j if worst is None else np.maximum(worst, psi_j)
    flat = int(worst.argmin())
    iy, iz = divmod(flat, pts.shape[0])
    return (
        float(worst.min()),
        (tuple(pts[iy]), tuple(pts[iz])),
        odd_man_synchronous_value(variant),
    )
