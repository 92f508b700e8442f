"""Exact expected one-shot payoff (alpha) and stakes multiplier (beta) for
n-player continuous Guts.

Model: hands are iid uniform on [0, 1]; player i holds iff hand > p_i.  The
ante is accounted at termination, so per-round returns carry a "virtual
ante" credit of (m - 1) where m is the round's stakes multiplier:

  h = 0 holders   standard: redeal, multiplier 1, all returns 0.
                  weenie: highest hand matches the pot, multiplier 2,
                  weenie returns 1 - n and everyone else +1.
  h = 1 holder    game ends (multiplier 0): winner n - 1, droppers -1.
  h >= 2 holders  multiplier h - 1: winner n + h - 2, losing holders
                  h - n - 2, droppers h - 2.

`alpha_general` / `beta_general` are the reference enumeration algorithms
(exponential in n, exact).  `alpha_player1_many` / `beta_many` are
vectorized evaluators for player 1 only, used to populate large matrices;
they evaluate the same expectations through an exact piecewise-polynomial
integral and agree with the enumeration to ~1e-15.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from math import comb, prod

import numpy as np

from .core import InvalidProfileError


class RuleVariant(Enum):
    STANDARD = "standard"
    WEENIE = "weenie"


@dataclass(frozen=True)
class ThresholdProfile:
    """Pure threshold strategies for all n players, in player order."""

    thresholds: tuple[float, ...]

    def __post_init__(self):
        if len(self.thresholds) < 2:
            raise InvalidProfileError("a profile needs at least 2 players")
        for p in self.thresholds:
            if not 0.0 <= p <= 1.0:
                raise InvalidProfileError(f"threshold {p!r} outside [0, 1]")

    @property
    def n(self) -> int:
        return len(self.thresholds)


@dataclass(frozen=True)
class PseudoBlocProfile:
    """Profile (p1, p2, bloc, ..., bloc) of length n: player 2 deviates,
    players 3..n share one bloc threshold."""

    p1: float
    p2: float
    bloc: float
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise InvalidProfileError("pseudo-bloc profiles need n >= 3 players")
        for p in (self.p1, self.p2, self.bloc):
            if not 0.0 <= p <= 1.0:
                raise InvalidProfileError(f"threshold {p!r} outside [0, 1]")

    def expanded(self) -> ThresholdProfile:
        return ThresholdProfile((self.p1, self.p2) + (self.bloc,) * (self.n - 2))


def _profile_tuple(profile) -> tuple[float, ...]:
    if isinstance(profile, ThresholdProfile):
        return profile.thresholds
    return ThresholdProfile(tuple(float(p) for p in profile)).thresholds


def alpha_general(profile) -> list[float]:
    """Expected immediate return of every player, standard rule.

    Enumerates each partition of the players into droppers D, guaranteed
    losers L, and fair-play contenders F.  With pH the highest threshold
    among holders, the scenario weight is

        prod_{i in D} p_i * prod_{i in F} (1 - pH) * prod_{i in L} (pH - p_i)

    and returns are h-2 (dropped), h-n-2 (lost), and for fair play the
    1/f chance of winning n+h-2 against (f-1)/f of h-n-2.  The all-drop
    event contributes nothing under the standard rule.
    """
    p = _profile_tuple(profile)
    n = len(p)
    value = [0.0] * n
    players = range(n)
    for d in range(n):  # number of droppers; all-drop contributes 0
        for drop_set in itertools.combinations(players, d):
            hold_set = [i for i in players if i not in drop_set]
            p_high = max(p[i] for i in hold_set)
            h = n - d
            w_drop = prod(p[i] for i in drop_set)
            for losers in _subsets(hold_set):
                f = h - len(losers)
                if f == 0:
                    continue  # zero weight: the pH holder cannot lose
                fair = [i for i in hold_set if i not in losers]
                weight = (
                    w_drop
                    * (1.0 - p_high) ** f
                    * prod(p_high - p[i] for i in losers)
                )
                if weight == 0.0:
                    continue
                ret_fair = ((n + h - 2) + (h - n - 2) * (f - 1)) / f
                for i in drop_set:
                    value[i] += weight * (h - 2)
                for i in losers:
                    value[i] += weight * (h - n - 2)
                for i in fair:
                    value[i] += weight * ret_fair
    return value


def _subsets(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def weenie_drop_corrections(profile) -> list[float]:
    """Per-player payoff delta of the all-drop weenie event.

    When everyone drops, the highest hand pays the pot (cash -n) while the
    stakes double, crediting +1 to all.  Player i's delta is therefore
    P(all drop) - n * W_i with W_i = P(all drop and hand_i is highest)
    = integral_0^{p_i} prod_{j != i} min(p_j, x) dx.
    """
    p = _profile_tuple(profile)
    n = len(p)
    all_drop = prod(p)
    out = []
    for i in range(n):
        others = p[:i] + p[i + 1 :]
        out.append(all_drop - n * _integral_min_prod(p[i], others))
    return out


def _integral_min_prod(upper: float, others) -> float:
    """integral_0^upper prod_j min(c_j, x) dx, exactly."""
    c = sorted(others)
    m = len(c)
    bounds = [0.0] + [min(max(v, 0.0), upper) for v in c] + [upper]
    total = 0.0
    prefix = 1.0
    for k in range(m + 1):
        lo, hi = bounds[k], bounds[k + 1]
        if hi > lo:
            e = m - k + 1
            total += prefix * (hi**e - lo**e) / e
        if k < m:
            prefix *= c[k]
    return total


def alpha_weenie_general(profile) -> list[float]:
    """Expected immediate returns under the weenie rule: standard returns
    plus the all-drop correction."""
    base = alpha_general(profile)
    corr = weenie_drop_corrections(profile)
    return [a + c for a, c in zip(base, corr)]


def alpha_for_rule(profile, rule: RuleVariant) -> list[float]:
    if rule is RuleVariant.WEENIE:
        return alpha_weenie_general(profile)
    return alpha_general(profile)


def beta_general(
    profile, rule: RuleVariant = RuleVariant.STANDARD, *, literal_weenie_beta: bool = False
) -> float:
    """Expected stakes multiplier.

    Sums over hold/drop splits: weight prod_{D} p_i * prod_{H} (1 - p_i),
    contribution h-1 for h >= 1 holders and 1 for the all-drop redeal.
    Under the weenie rule the all-drop event doubles the pot, contributing
    2; pass literal_weenie_beta=True for the variant where weenie beta is
    read as identical to standard beta.
    """
    p = _profile_tuple(profile)
    n = len(p)
    all_drop_factor = 1.0
    if rule is RuleVariant.WEENIE and not literal_weenie_beta:
        all_drop_factor = 2.0
    beta = 0.0
    for hold_mask in itertools.product((False, True), repeat=n):
        h = sum(hold_mask)
        weight = prod((1.0 - p[i]) if held else p[i] for i, held in enumerate(hold_mask))
        beta += weight * ((h - 1) if h >= 1 else all_drop_factor)
    return beta


# ---------------------------------------------------------------------------
# Closed forms for n = 2, 3 (oracles for the general algorithms)
# ---------------------------------------------------------------------------


def alpha_closed(n: int, profile, rule: RuleVariant = RuleVariant.STANDARD) -> list[float]:
    """Case-split closed-form payoffs for 2- and 3-player Guts.

    Player 1's payoff comes from the explicit case formulas; other players
    are obtained by permuting the queried player to the front.
    """
    p = _profile_tuple(profile)
    if n not in (2, 3) or len(p) != n:
        raise InvalidProfileError(f"closed forms exist for n in {{2, 3}}, got n={n}")
    if n == 2:
        f = _alpha2_weenie if rule is RuleVariant.WEENIE else _alpha2_standard
        return [f(p[0], p[1]), f(p[1], p[0])]
    f3 = _alpha3_weenie if rule is RuleVariant.WEENIE else _alpha3_standard
    return [
        f3(p[0], p[1], p[2]),
        f3(p[1], p[0], p[2]),
        f3(p[2], p[0], p[1]),
    ]


def beta_closed(n: int, profile, rule: RuleVariant = RuleVariant.STANDARD) -> float:
    p = _profile_tuple(profile)
    if n not in (2, 3) or len(p) != n:
        raise InvalidProfileError(f"closed forms exist for n in {{2, 3}}, got n={n}")
    if n == 2:
        beta = p[0] * p[1] + (1 - p[0]) * (1 - p[1])
        extra = p[0] * p[1]
    else:
        beta = 2 - p[0] - p[1] - p[2] + 2 * p[0] * p[1] * p[2]
        extra = p[0] * p[1] * p[2]
    if rule is RuleVariant.WEENIE:
        beta += extra  # all-drop doubles instead of redealing at par
    return beta


def _alpha2_standard(p1, p2):
    if p2 <= p1:
        return (1 - 2 * p1) * (p1 - p2)
    return (1 - 2 * p2) * (p1 - p2)


def _alpha2_weenie(p1, p2):
    if p2 <= p1:
        return (1 - 2 * p1 - p2) * (p1 - p2)
    return (1 - 2 * p2 - p1) * (p1 - p2)


def _alpha3_standard(p1, p2, p3):
    if p3 < p2:  # remaining orderings follow by symmetry in (p2, p3)
        p2, p3 = p3, p2
    if p1 <= p2:
        return 2 * p1 - p2 - p3 + p3**3 + 3 * p2**2 * p3 - 4 * p1 * p2 * p3
    if p1 <= p3:
        return 2 * p1 - p2 - p3 + p3**3 - 3 * p1**2 * p3 + 2 * p1 * p2 * p3
    return 2 * p1 - p2 - p3 - 2 * p1**3 + 2 * p1 * p2 * p3


def _alpha3_weenie(p1, p2, p3):
    if p3 < p2:
        p2, p3 = p3, p2
    if p1 <= p2:
        return 2 * p1 - p2 - p3 + p3**3 - p1**3 + 3 * p2**2 * p3 - 3 * p1 * p2 * p3
    if p1 <= p3:
        return (
            2 * p1
            - p2
            - p3
            + p2**3 / 2
            + p3**3
            - 1.5 * p1**2 * p2
            - 3 * p1**2 * p3
            + 3 * p1 * p2 * p3
        )
    return 2 * p1 - p2 - p3 - 2 * p1**3 + p2**3 / 2 + 1.5 * p2 * p3**2


# ---------------------------------------------------------------------------
# Pseudo-bloc fast path
# ---------------------------------------------------------------------------


def alpha_pseudo_bloc(pb: PseudoBlocProfile, rule: RuleVariant = RuleVariant.STANDARD) -> float:
    """Player-1 payoff against a pseudo-bloc coalition, in O(n^2).

    Only the count of bloc members dropping/holding/contending matters, so
    subsets collapse to binomial weights.  Matches alpha on the expanded
    profile exactly.
    """
    n, a, b, c = pb.n, pb.p1, pb.p2, pb.bloc
    k = n - 2
    total = 0.0
    for s1_holds in (False, True):
        for s2_holds in (False, True):
            for bloc_drops in range(k + 1):
                bloc_holds = k - bloc_drops
                h = int(s1_holds) + int(s2_holds) + bloc_holds
                if h == 0:
                    continue
                thresholds = []
                if s1_holds:
                    thresholds.append(a)
                if s2_holds:
                    thresholds.append(b)
                if bloc_holds:
                    thresholds.append(c)
                p_high = max(thresholds)
                w_bloc_split = comb(k, bloc_drops) * c**bloc_drops
                w2_total = (1.0 - b) if s2_holds else b
                if not s1_holds:
                    weight = a * w2_total * w_bloc_split * (1.0 - c) ** bloc_holds
                    total += weight * (h - 2)
                    continue
                # player 1 guaranteed to lose
                weight = (p_high - a) * w2_total * w_bloc_split * (1.0 - c) ** bloc_holds
                total += weight * (h - n - 2)
                # player 1 in fair play: split the rest into fair/lose
                s2_states = [(b, 0)] if not s2_holds else [
                    (1.0 - p_high, 1),
                    (p_high - b, 0),
                ]
                for w2, f2 in s2_states:
                    for bloc_fair in range(bloc_holds + 1):
                        w_bloc = (
                            comb(bloc_holds, bloc_fair)
                            * (1.0 - p_high) ** bloc_fair
                            * (p_high - c) ** (bloc_holds - bloc_fair)
                        )
                        f = 1 + f2 + bloc_fair
                        ret = ((n + h - 2) + (h - n - 2) * (f - 1)) / f
                        total += (1.0 - p_high) * w2 * w_bloc_split * w_bloc * ret
    if rule is RuleVariant.WEENIE:
        all_drop = a * b * c**k
        w1 = _integral_min_prod(a, [b] + [c] * k)
        total += all_drop - n * w1
    return total


# ---------------------------------------------------------------------------
# Vectorized player-1 evaluators (exact; used by matrix builders)
# ---------------------------------------------------------------------------


def alpha_player1_many(
    p1: float,
    opponents: np.ndarray,
    rule: RuleVariant = RuleVariant.STANDARD,
    *,
    opponents_sorted: bool = False,
) -> np.ndarray:
    """Player-1 alpha against a batch of opponent threshold tuples.

    opponents: array of shape (C, n-1).  Evaluates the identity

      alpha_1 = sum_i (1 - q_i) - 2 (1 - prod_i q_i) - n (1 - q_1)
                + 2 n * integral_{q_1}^1 prod_{j>1} max(q_j, x) dx

    (droppers' h-2 credits resummed; the integral is the win probability
    weighted by the 2n swing between winning and losing), plus the all-drop
    correction under the weenie rule.  The integral is computed exactly as
    a piecewise power function.
    """
    opp = np.asarray(opponents, dtype=float)
    if opp.ndim != 2:
        raise InvalidProfileError("opponents must have shape (C, n-1)")
    c, m = opp.shape
    n = m + 1
    u = opp if opponents_sorted else np.sort(opp, axis=1)
    prod_opp = np.prod(u, axis=1)
    hold_sum = (1.0 - u).sum(axis=1) + (1.0 - p1)
    win_int = _integral_max_prod_above(p1, u)
    alpha = (
        hold_sum
        - 2.0 * (1.0 - p1 * prod_opp)
        - n * (1.0 - p1)
        + 2.0 * n * win_int
    )
    if rule is RuleVariant.WEENIE:
        w1 = _integral_min_prod_below(p1, u)
        alpha += p1 * prod_opp - n * w1
    return alpha


def beta_many(
    p1: float, opponents: np.ndarray, rule: RuleVariant = RuleVariant.STANDARD
) -> np.ndarray:
    """Stakes multiplier for a batch of opponent tuples (profile-symmetric):
    beta = E[h] - P(h >= 1) + factor * P(all drop)."""
    opp = np.asarray(opponents, dtype=float)
    prod_all = p1 * np.prod(opp, axis=1)
    hold_sum = (1.0 - opp).sum(axis=1) + (1.0 - p1)
    factor = 3.0 if rule is RuleVariant.WEENIE else 2.0
    return hold_sum - 1.0 + factor * prod_all


def _integral_max_prod_above(a: float, u: np.ndarray) -> np.ndarray:
    """integral_a^1 prod_j max(u_j, x) dx for each row of sorted u (C, m)."""
    c, m = u.shape
    # suffix products: suf[:, k] = prod_{j >= k} u_j, suf[:, m] = 1
    suf = np.ones((c, m + 1))
    suf[:, :-1] = np.cumprod(u[:, ::-1], axis=1)[:, ::-1]
    bounds = np.empty((c, m + 2))
    bounds[:, 0] = a
    np.clip(u, a, 1.0, out=bounds[:, 1:-1])
    bounds[:, -1] = 1.0
    total = np.zeros(c)
    for k in range(m + 1):
        e = k + 1
        total += suf[:, k] * (bounds[:, k + 1] ** e - bounds[:, k] ** e) / e
    return total


def _integral_min_prod_below(a: float, u: np.ndarray) -> np.ndarray:
    """integral_0^a prod_j min(u_j, x) dx for each row of sorted u (C, m)."""
    c, m = u.shape
    pre = np.ones((c, m + 1))
    pre[:, 1:] = np.cumprod(u, axis=1)
    bounds = np.empty((c, m + 2))
    bounds[:, 0] = 0.0
    np.clip(u, 0.0, a, out=bounds[:, 1:-1])
    bounds[:, -1] = a
    total = np.zeros(c)
    for k in range(m + 1):
        e = m - k + 1
        total += pre[:, k] * (bounds[:, k + 1] ** e - bounds[:, k] ** e) / e
    return total


# ---------------------------------------------------------------------------
# Monte Carlo oracle
# ---------------------------------------------------------------------------


def monte_carlo_alpha(
    profile,
    rule: RuleVariant = RuleVariant.STANDARD,
    rounds: int = 100_000,
    seed: int | None = 0,
):
    """Simulate dealt rounds and return (mean returns, standard errors).

    Independent statistical check on the exact algorithms; one uniform hand
    per player per round, immediate-return accounting as in alpha.
    """
    if rounds < 1:
        raise InvalidProfileError("rounds must be >= 1")
    p = np.asarray(_profile_tuple(profile), dtype=float)
    n = p.size
    rng = np.random.default_rng(seed)
    returns = np.zeros((rounds, n))
    hands = rng.random((rounds, n))
    holds = hands > p
    h = holds.sum(axis=1)

    live = h >= 1
    if np.any(live):
        ret = np.repeat((h[live] - 2.0)[:, None], n, axis=1)  # droppers keep h - 2
        ret[holds[live]] -= n  # holders provisionally lose
        masked = np.where(holds[live], hands[live], -1.0)
        winners = masked.argmax(axis=1)
        ret[np.arange(ret.shape[0]), winners] += 2.0 * n  # winner swing
        returns[live] = ret
    if rule is RuleVariant.WEENIE:
        dead = ~live
        if np.any(dead):
            ret = np.ones((int(dead.sum()), n))
            weenies = hands[dead].argmax(axis=1)
            ret[np.arange(ret.shape[0]), weenies] = 1.0 - n
            returns[dead] = ret

    means = returns.mean(axis=0)
    if rounds > 1:
        ses = returns.std(axis=0, ddof=1) / np.sqrt(rounds)
    else:
        ses = np.zeros(n)
    return means, ses
