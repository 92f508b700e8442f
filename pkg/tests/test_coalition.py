import math

import numpy as np
import pytest

from gutslab.coalition import (
    FitFailureError,
    SolveMode,
    fit_rational,
    nash_threshold,
    solve_one_vs_n,
    solve_two_vs_two,
    verify_weenie_optimality,
)
from gutslab.core import InvalidProfileError, make_grid
from gutslab.matrices import build_bloc_matrices
from gutslab.payoff import RuleVariant
from gutslab.recursive import RecursiveGameSpec, value_iteration

# published opponent values (coalition size N -> value), used as fit input
TABLE1 = {
    2: 0.0132, 3: 0.0339, 4: 0.0516, 5: 0.0654, 6: 0.0753,
    7: 0.0847, 8: 0.0909, 9: 0.0954, 10: 0.1007, 11: 0.1066,
    12: 0.1074, 13: 0.1110, 14: 0.1154, 15: 0.1184,
}


class TestNashThreshold:
    def test_standard(self):
        assert nash_threshold(2) == pytest.approx(0.5)
        assert nash_threshold(3) == pytest.approx(1 / math.sqrt(2))
        assert nash_threshold(5) == pytest.approx(0.5 ** (1 / 4))

    def test_weenie(self):
        assert nash_threshold(2, RuleVariant.WEENIE) == pytest.approx(1 / 3)
        assert nash_threshold(3, RuleVariant.WEENIE) == pytest.approx(1 / math.sqrt(3))

    def test_rejects_small_n(self):
        with pytest.raises(InvalidProfileError):
            nash_threshold(1)


class TestFitRational:
    def test_exact_recovery(self):
        pts = [(n, 0.2 - 0.5 / (n - 1.0)) for n in range(3, 11)]
        fit = fit_rational(pts)
        assert fit.a == pytest.approx(0.2, abs=1e-8)
        assert fit.b == pytest.approx(0.5, abs=1e-7)
        assert fit.c == pytest.approx(1.0, abs=1e-6)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_published_table(self):
        fit = fit_rational(sorted(TABLE1.items()))
        assert fit.a == pytest.approx(0.163, abs=0.02)
        assert abs(fit.c) == pytest.approx(3.6, abs=0.5)
        assert fit.c < 2  # pole sits outside the fitted range
        assert fit.r_squared >= 0.995

    def test_constant_data(self):
        fit = fit_rational([(n, 0.25) for n in range(2, 8)])
        assert fit.b == pytest.approx(0.0, abs=1e-8)
        assert 0.0 <= fit.r_squared <= 1.0

    def test_needs_four_points(self):
        with pytest.raises(FitFailureError):
            fit_rational([(2, 0.1), (3, 0.2), (4, 0.3)])

    def test_distinct_n(self):
        with pytest.raises(FitFailureError):
            fit_rational([(2, 0.1), (2, 0.2), (3, 0.3), (4, 0.4)])

    def test_callable(self):
        fit = fit_rational(sorted(TABLE1.items()))
        assert fit(5) == pytest.approx(TABLE1[5], abs=0.005)


class TestSolves:
    def test_two_player_value_zero(self):
        sol = solve_one_vs_n(2, 11, SolveMode.FULL, seed=0)
        assert abs(sol.opponent_value) <= 1e-3
        assert sol.solve.converged

    def test_mode_equivalence_small(self):
        full = solve_one_vs_n(3, 21, SolveMode.FULL, seed=1)
        pseudo = solve_one_vs_n(3, 21, SolveMode.PSEUDO_BLOC, seed=1)
        assert abs(full.opponent_value - pseudo.opponent_value) <= 2e-3

    def test_pseudo_bloc_needs_three(self):
        with pytest.raises(InvalidProfileError):
            solve_one_vs_n(2, 11, SolveMode.PSEUDO_BLOC)

    def test_support_is_canonical_and_normalized(self):
        sol = solve_one_vs_n(3, 21, SolveMode.FULL, seed=1)
        weights = [w for _, w in sol.decoded_support]
        assert sum(weights) == pytest.approx(1.0, abs=1e-9)
        for thresholds, _ in sol.decoded_support:
            assert list(thresholds) == sorted(thresholds)

    def test_player1_never_wins_standard(self):
        sol = solve_one_vs_n(3, 21, SolveMode.PSEUDO_BLOC, seed=2)
        assert sol.player1_value <= 1e-6

    def test_bloc_restricted_is_fair(self):
        for n in (2, 3):
            mats = build_bloc_matrices(n, make_grid(21))
            spec = RecursiveGameSpec(matrices=mats)
            res = value_iteration(spec, tolerance=1e-5)
            assert res.fixed_point == pytest.approx(0.0, abs=1e-3)

    def test_jsonable(self):
        sol = solve_one_vs_n(3, 11, SolveMode.PSEUDO_BLOC, seed=0)
        data = sol.to_jsonable()
        assert data["coalition_size"] == 2
        assert data["mode"] == "pseudo-bloc"


class TestWeenieOptimality:
    def test_coarse_three_player(self):
        minimum, argmin = verify_weenie_optimality(3, 11)
        assert minimum >= -1e-9
        nash = nash_threshold(3, RuleVariant.WEENIE)
        assert all(abs(t - nash) <= 0.1 + 1e-9 for t in argmin)

    def test_rejects_small_n(self):
        with pytest.raises(InvalidProfileError):
            verify_weenie_optimality(1, 11)


class TestTwoVsTwo:
    def test_smoke_small_grid(self):
        sol = solve_two_vs_two(5, seed=0)
        assert abs(sol.value) < 0.1
        assert sum(w for _, w in sol.row_support) == pytest.approx(1.0, abs=1e-9)
