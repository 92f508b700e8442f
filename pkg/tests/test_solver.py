import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gutslab.core import InvalidInputError, MixedStrategy, OracleScaleError
from gutslab.solver import duality_gap, exact_minimax, fictitious_play

PENNIES = np.array([[1.0, -1.0], [-1.0, 1.0]])
RPS = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])


class TestFictitiousPlay:
    def test_matching_pennies(self):
        res = fictitious_play(PENNIES, gap_tolerance=1e-2, seed=0)
        assert res.value_lower - 1e-12 <= 0.0 <= res.value_upper + 1e-12
        assert res.gap <= 1e-2
        assert res.empirical_row.as_array() == pytest.approx([0.5, 0.5], abs=0.05)
        assert res.empirical_col.as_array() == pytest.approx([0.5, 0.5], abs=0.05)

    def test_rock_paper_scissors(self):
        res = fictitious_play(RPS, gap_tolerance=1e-2, seed=3)
        assert res.value_lower - 1e-12 <= 0.0 <= res.value_upper + 1e-12
        assert res.empirical_row.as_array() == pytest.approx([1 / 3] * 3, abs=0.05)

    def test_deterministic(self):
        a = fictitious_play(RPS, gap_tolerance=1e-4, seed=42, record_plays=True)
        b = fictitious_play(RPS, gap_tolerance=1e-4, seed=42, record_plays=True)
        assert a.value_lower == b.value_lower
        assert a.value_upper == b.value_upper
        assert np.array_equal(a.plays, b.plays)
        assert np.array_equal(
            a.empirical_row.as_array(), b.empirical_row.as_array()
        )
        assert np.array_equal(a.bound_trace, b.bound_trace)

    def test_cap_flags_nonconverged(self):
        res = fictitious_play(PENNIES, max_iterations=3, gap_tolerance=1e-12, seed=1)
        assert not res.converged
        assert res.iterations_used == 3

    def test_bracket_ordered_and_trace(self):
        res = fictitious_play(RPS, gap_tolerance=1e-3, seed=9)
        assert res.value_lower <= res.value_upper
        t, lo, up = res.bound_trace[-1]
        assert (lo, up) == (res.value_lower, res.value_upper)
        gaps = [g for _, g in res.gap_trace]
        assert all(g >= -1e-15 for g in gaps)
        # envelope bounds make the recorded gap monotone nonincreasing
        assert all(a >= b - 1e-15 for a, b in zip(gaps, gaps[1:]))

    def test_strategy_bound_coherence(self):
        res = fictitious_play(RPS, gap_tolerance=5e-3, seed=4)
        recomputed = duality_gap(RPS, res.empirical_row, res.empirical_col)
        assert recomputed == pytest.approx(res.gap, abs=1e-12)

    def test_rejects_empty(self):
        with pytest.raises(InvalidInputError):
            fictitious_play(np.empty((0, 3)))

    def test_rejects_nan(self):
        with pytest.raises(InvalidInputError):
            fictitious_play(np.array([[np.nan, 1.0]]))

    @given(
        st.integers(min_value=1, max_value=6),
        st.integers(min_value=1, max_value=6),
        st.integers(min_value=0, max_value=10_000),
    )
    @settings(max_examples=30, deadline=None)
    def test_bracket_contains_exact_value(self, m, n, seed):
        rng = np.random.default_rng(seed)
        A = rng.normal(size=(m, n))
        res = fictitious_play(A, max_iterations=200_000, gap_tolerance=1e-3, seed=seed)
        exact = exact_minimax(A)
        assert res.value_lower - 1e-9 <= exact.value <= res.value_upper + 1e-9


class TestExactMinimax:
    def test_singleton(self):
        sol = exact_minimax(np.array([[0.0]]))
        assert sol.value == 0.0

    def test_matching_pennies(self):
        sol = exact_minimax(PENNIES)
        assert sol.value == pytest.approx(0.0, abs=1e-12)
        assert sol.row_strategy.as_array() == pytest.approx([0.5, 0.5], abs=1e-12)
        assert sol.col_strategy.as_array() == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_column_game(self):
        # 2 x 1: alpha (0, 0), beta (1/2, 2) staked at V = -1
        A = np.array([[-0.5], [-2.0]])
        sol = exact_minimax(A)
        assert sol.value == pytest.approx(-0.5)
        assert sol.row_strategy.weights == (1.0, 0.0)

    def test_mutual_best_response(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            A = rng.normal(size=tuple(rng.integers(1, 9, size=2)))
            sol = exact_minimax(A)
            x = sol.row_strategy.as_array()
            y = sol.col_strategy.as_array()
            assert (x @ A).min() >= sol.value - 1e-9
            assert (A @ y).max() <= sol.value + 1e-9
            assert duality_gap(A, sol.row_strategy, sol.col_strategy) <= 1e-9

    def test_oracle_scale_guard(self):
        with pytest.raises(OracleScaleError):
            exact_minimax(np.zeros((9, 9)))


class TestDualityGap:
    def test_zero_at_saddle(self):
        sol = exact_minimax(PENNIES)
        assert duality_gap(PENNIES, sol.row_strategy, sol.col_strategy) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_pure_pennies(self):
        pure = MixedStrategy.pure(0, 2)
        assert duality_gap(PENNIES, pure, pure) == pytest.approx(2.0)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            duality_gap(PENNIES, MixedStrategy.pure(0, 3), MixedStrategy.pure(0, 2))

    @given(st.integers(min_value=0, max_value=500))
    @settings(max_examples=40, deadline=None)
    def test_nonnegative(self, seed):
        rng = np.random.default_rng(seed)
        m, n = rng.integers(1, 7, size=2)
        A = rng.normal(size=(int(m), int(n)))
        x = MixedStrategy.from_weights(rng.random(int(m)) + 1e-9)
        y = MixedStrategy.from_weights(rng.random(int(n)) + 1e-9)
        assert duality_gap(A, x, y) >= -1e-14
