"""Live 1-vs-n guts sessions: the human is player 1, the coalition plays a
precomputed optimal mixed policy.

Money flows are cash-based: every player antes one unit up front (pot =
n+1, bankrolls -1), pot matches are deducted when incurred, and the sole
holder collects the pot.  The system total (sum of bankrolls + pot) is
therefore identically zero, and a session's final player-1 bankroll equals
the recursive-game return.

Per round the coalition redraws one joint strategy column from its policy,
members draw fresh uniform hands and hold above their thresholds.  Hands
are continuous; only thresholds live on the grid.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .core import GutslabError
from .payoff import RuleVariant


class SessionStateError(GutslabError, RuntimeError):
    """Decision submitted outside the awaiting-decision phase."""


class PolicyUnavailableError(GutslabError, LookupError):
    """No coalition policy for the requested (players, mesh, rule)."""


class Phase(Enum):
    AWAITING_DECISION = "awaiting_decision"
    TERMINATED = "terminated"


@dataclass(frozen=True)
class CoalitionPolicy:
    """Stationary coalition policy: a mixed strategy over joint threshold
    tuples (one threshold per member), plus coach metadata."""

    n_total: int
    mesh_points: int
    rule: RuleVariant
    support: tuple[tuple[tuple[float, ...], float], ...]
    player1_threshold: float
    opponent_value: float
    source: str = ""

    def __post_init__(self):
        for thresholds, _ in self.support:
            if len(thresholds) != self.n_total - 1:
                raise GutslabError(
                    f"policy support tuple {thresholds} does not have "
                    f"{self.n_total - 1} member thresholds"
                )
        total = sum(w for _, w in self.support)
        if abs(total - 1.0) > 1e-6:
            raise GutslabError(f"policy support weights sum to {total}, not 1")

    @property
    def coalition_size(self) -> int:
        return self.n_total - 1

    @classmethod
    def from_solution(cls, solution, source: str = "") -> "CoalitionPolicy":
        """Build a session policy from a CoalitionSolution, expanding
        pseudo-bloc (deviator, bloc) pairs to full member tuples."""
        from .coalition import SolveMode

        members = solution.n - 1
        support = []
        for thresholds, weight in solution.decoded_support:
            if solution.mode is SolveMode.PSEUDO_BLOC and len(thresholds) == 2:
                expanded = (thresholds[0],) + (thresholds[1],) * (members - 1)
            else:
                expanded = tuple(thresholds)
            support.append((expanded, weight))
        return cls(
            n_total=solution.n,
            mesh_points=solution.mesh_points,
            rule=solution.rule,
            support=tuple(support),
            player1_threshold=solution.player1_threshold(),
            opponent_value=solution.opponent_value,
            source=source,
        )

    def to_jsonable(self) -> dict:
        return {
            "n_total": self.n_total,
            "mesh_points": self.mesh_points,
            "rule": self.rule.value,
            "support": [[list(t), w] for t, w in self.support],
            "player1_threshold": self.player1_threshold,
            "opponent_value": self.opponent_value,
            "source": self.source,
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "CoalitionPolicy":
        return cls(
            n_total=int(data["n_total"]),
            mesh_points=int(data["mesh_points"]),
            rule=RuleVariant(data["rule"]),
            support=tuple(
                (tuple(float(x) for x in t), float(w)) for t, w in data["support"]
            ),
            player1_threshold=float(data["player1_threshold"]),
            opponent_value=float(data["opponent_value"]),
            source=str(data.get("source", "")),
        )


@dataclass(frozen=True)
class RoundResolution:
    """One resolved round.  Player 0 is the human; members follow."""

    round_index: int
    decisions: tuple[bool, ...]  # hold flags
    hands: tuple[float, ...]
    winner: int | None
    pot_before: float
    pot_after: float
    bankroll_deltas: tuple[float, ...]
    terminated: bool
    weenie: int | None = None

    def to_jsonable(self) -> dict:
        return {
            "round_index": self.round_index,
            "decisions": ["hold" if d else "drop" for d in self.decisions],
            "hands": list(self.hands),
            "winner": self.winner,
            "pot_before": self.pot_before,
            "pot_after": self.pot_after,
            "bankroll_deltas": list(self.bankroll_deltas),
            "terminated": self.terminated,
            "weenie": self.weenie,
        }


class GameSession:
    """State machine of one interactive guts game."""

    def __init__(
        self,
        policy: CoalitionPolicy,
        seed=None,  # anything np.random.default_rng accepts
        session_id: str | None = None,
        transcript_path: str | Path | None = None,
    ):
        self.session_id = session_id or uuid.uuid4().hex
        self.policy = policy
        self.n = policy.coalition_size
        self.rule = policy.rule
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        players = self.n + 1
        self.pot = float(players)  # everyone antes one unit
        self.bankrolls = [-1.0] * players
        self.round_index = 0
        self.history: list[RoundResolution] = []
        self.phase = Phase.AWAITING_DECISION
        self.player_hand: float | None = float(self.rng.random())
        self._weights = np.array([w for _, w in policy.support])
        self._cumweights = np.cumsum(self._weights)
        self._transcript_path = Path(transcript_path) if transcript_path else None
        self.lock = threading.Lock()

    def _draw_coalition_thresholds(self) -> tuple[float, ...]:
        u = float(self.rng.random())
        k = int(np.searchsorted(self._cumweights, u, side="right"))
        k = min(k, len(self.policy.support) - 1)
        return self.policy.support[k][0]

    def submit_decision(self, decision: str) -> RoundResolution:
        if self.phase is not Phase.AWAITING_DECISION:
            raise SessionStateError(
                f"session {self.session_id} is {self.phase.value}; no decision expected"
            )
        if decision not in ("hold", "drop"):
            raise GutslabError(f"decision must be 'hold' or 'drop', got {decision!r}")

        thresholds = self._draw_coalition_thresholds()
        bot_hands = self.rng.random(self.n)
        hands = (self.player_hand, *map(float, bot_hands))
        holds = (decision == "hold",) + tuple(
            bool(h > t) for h, t in zip(bot_hands, thresholds)
        )
        resolution = self._resolve(hands, holds)
        self.history.append(resolution)
        self.round_index += 1
        if resolution.terminated:
            self.phase = Phase.TERMINATED
            self.player_hand = None
        else:
            self.player_hand = float(self.rng.random())
        self._append_transcript(resolution)
        return resolution

    def _resolve(self, hands, holds) -> RoundResolution:
        players = self.n + 1
        pot_before = self.pot
        m = sum(holds)
        deltas = [0.0] * players
        winner = None
        weenie = None
        terminated = False

        if m == 0:
            if self.rule is RuleVariant.WEENIE:
                weenie = int(np.argmax(hands))
                deltas[weenie] = -pot_before
                self.pot = 2.0 * pot_before
            # standard: redeal at the same stakes
        elif m == 1:
            winner = holds.index(True)
            deltas[winner] = pot_before
            self.pot = 0.0
            terminated = True
        else:
            holding = [i for i, h in enumerate(holds) if h]
            winner = max(holding, key=lambda i: hands[i])
            for i in holding:
                deltas[i] = pot_before if i == winner else -pot_before
            self.pot = (m - 1) * pot_before

        for i, d in enumerate(deltas):
            self.bankrolls[i] += d
        return RoundResolution(
            round_index=self.round_index,
            decisions=tuple(holds),
            hands=tuple(float(h) for h in hands),
            winner=winner,
            pot_before=pot_before,
            pot_after=self.pot,
            bankroll_deltas=tuple(deltas),
            terminated=terminated,
            weenie=weenie,
        )

    def _append_transcript(self, resolution: RoundResolution):
        if self._transcript_path is None:
            return
        with open(self._transcript_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(resolution.to_jsonable(), sort_keys=True))
            fh.write("\n")

    def system_total(self) -> float:
        """Sum of bankrolls plus pot in play; identically zero."""
        return sum(self.bankrolls) + self.pot

    def public_state(self, coach: bool = False) -> dict:
        state = {
            "session_id": self.session_id,
            "players": self.n + 1,
            "rule": self.rule.value,
            "mesh_points": self.policy.mesh_points,
            "phase": self.phase.value,
            "pot": self.pot,
            "round_index": self.round_index,
            "player_hand": self.player_hand,
            "bankrolls": list(self.bankrolls),
            "history": [r.to_jsonable() for r in self.history],
        }
        if coach:
            state["coach"] = {
                "policy_support": [[list(t), w] for t, w in self.policy.support],
                "best_response_threshold": self.policy.player1_threshold,
                "opponent_value": self.policy.opponent_value,
            }
        return state


class PolicyStore:
    """Registry of coalition policies; optionally solves on demand."""

    def __init__(self, compute_on_demand: bool = False, solver_kwargs: dict | None = None):
        self._policies: dict[tuple[int, int, RuleVariant], CoalitionPolicy] = {}
        self.compute_on_demand = compute_on_demand
        self.solver_kwargs = solver_kwargs or {}
        self._lock = threading.Lock()

    def register(self, policy: CoalitionPolicy):
        key = (policy.n_total, policy.mesh_points, policy.rule)
        with self._lock:
            self._policies[key] = policy

    def load_file(self, path) -> CoalitionPolicy:
        with open(path, "r", encoding="utf-8") as fh:
            policy = CoalitionPolicy.from_jsonable(json.load(fh))
        self.register(policy)
        return policy

    def get(self, n_total: int, mesh_points: int, rule: RuleVariant) -> CoalitionPolicy:
        key = (n_total, mesh_points, rule)
        with self._lock:
            if key in self._policies:
                return self._policies[key]
        if not self.compute_on_demand:
            raise PolicyUnavailableError(
                f"no policy for {n_total} players at mesh {mesh_points} "
                f"({rule.value}); precompute it with solve_one_vs_n or the "
                f"CLI solve command"
            )
        from .coalition import SolveMode, solve_one_vs_n

        mode = SolveMode.PSEUDO_BLOC if n_total >= 4 else SolveMode.FULL
        solution = solve_one_vs_n(
            n_total, mesh_points, mode, rule, **self.solver_kwargs
        )
        policy = CoalitionPolicy.from_solution(solution, source="on-demand solve")
        self.register(policy)
        return policy


def run_scripted_sessions(
    policy: CoalitionPolicy,
    n_sessions: int,
    hold_threshold: float,
    seed: int = 0,
    max_rounds: int = 10_000,
) -> np.ndarray:
    """Play many sessions with a scripted threshold player; returns the
    per-session player-1 totals (in initial-ante units)."""
    returns = np.empty(n_sessions)
    for k in range(n_sessions):
        session = GameSession(policy, seed=(seed, k))
        for _ in range(max_rounds):
            decision = "hold" if session.player_hand > hold_threshold else "drop"
            resolution = session.submit_decision(decision)
            if resolution.terminated:
                break
        returns[k] = session.bankrolls[0]
    return returns
