"""Tests for exact waterfilling."""

import numpy as np
import pytest

from mimo_antsel.exceptions import DomainError
from mimo_antsel.waterfill import water_level, waterfill, waterfill_batch


def objective(gains: np.ndarray, p: np.ndarray) -> float:
    return float(np.sum(np.log2(1 + gains * p)))


class TestWaterfill:
    """Closed-form cases."""

    def test_two_channels(self) -> None:
        p = waterfill([4.0, 1.0], 1.0)
        np.testing.assert_allclose(p, [0.875, 0.125], atol=1e-15)
        assert objective(np.array([4.0, 1.0]), p) == pytest.approx(2.3399, abs=1e-4)
        assert water_level([4.0, 1.0], 1.0) == pytest.approx(1.125)

    def test_single_channel_takes_budget(self) -> None:
        np.testing.assert_allclose(waterfill([3.7], 2.5), [2.5])

    def test_weak_channel_shut_off(self) -> None:
        np.testing.assert_allclose(waterfill([10.0, 0.01], 0.5), [0.5, 0.0], atol=1e-15)

    def test_equal_gains_split_evenly(self) -> None:
        np.testing.assert_allclose(waterfill([2.0, 2.0, 2.0, 2.0], 1.0), [0.25] * 4)

    @pytest.mark.parametrize("gains", [[1.0, 0.0], [1.0, -2.0], [np.inf, 1.0], [np.nan]])
    def test_invalid_gains(self, gains: list[float]) -> None:
        with pytest.raises(DomainError):
            waterfill(gains, 1.0)

    @pytest.mark.parametrize("budget", [0.0, -1.0, np.inf])
    def test_invalid_budget(self, budget: float) -> None:
        with pytest.raises(DomainError):
            waterfill([1.0, 2.0], budget)


class TestWaterfillOptimality:
    """KKT conditions and agreement with a grid search."""

    def test_kkt_residual_on_random_vectors(self) -> None:
        rng = np.random.default_rng(123)
        for _ in range(1000):
            n = int(rng.integers(1, 9))
            gains = 10 ** rng.uniform(-2, 2, n)
            budget = float(10 ** rng.uniform(-1, 1))
            p = waterfill(gains, budget)
            mu = water_level(gains, budget)

            assert np.all(p >= 0)
            assert p.sum() == pytest.approx(budget, rel=1e-12)
            residual = np.max(np.abs(p * (1 / gains + p - mu)))
            assert residual < 1e-9 * budget
            # Inactive channels sit above the water level
            assert np.all(1 / gains[p == 0] >= mu - 1e-12)

    def test_matches_grid_search(self) -> None:
        rng = np.random.default_rng(5)
        grid = np.linspace(0.0, 1.0, 100_001)
        for _ in range(200):
            gains = 10 ** rng.uniform(-1, 1.5, 2)
            p = waterfill(gains, 1.0)
            brute = np.max(np.log2(1 + gains[0] * grid) + np.log2(1 + gains[1] * (1 - grid)))
            assert objective(gains, p) == pytest.approx(brute, abs=1e-3)
            assert objective(gains, p) >= brute - 1e-12


class TestWaterfillBatch:
    def test_rows_are_independent(self) -> None:
        gains = np.array([[4.0, 1.0], [10.0, 0.01]])
        p = waterfill_batch(gains, 1.0)
        np.testing.assert_allclose(p[0], waterfill([4.0, 1.0], 1.0))
        np.testing.assert_allclose(p[1], waterfill([10.0, 0.01], 1.0))

    def test_zero_gain_gets_no_power(self) -> None:
        p = waterfill_batch(np.array([[0.0, 2.0, 1.0]]), 1.0)
        assert p[0, 0] == 0.0
        assert p[0].sum() == pytest.approx(1.0)

    def test_row_without_gain_rejected(self) -> None:
        with pytest.raises(DomainError):
            waterfill_batch(np.array([[1.0, 1.0], [0.0, 0.0]]), 1.0)
