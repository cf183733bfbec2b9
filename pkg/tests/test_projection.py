"""Tests for the capped-simplex projection."""

import numpy as np
import pytest

from mimo_antsel.exceptions import PreconditionError
from mimo_antsel.projection import project_capped_simplex


class TestProjectCappedSimplex:
    @pytest.mark.parametrize(
        ("v", "n", "expected"),
        [
            ([0.5, 0.5, 0.5], 1.5, [0.5, 0.5, 0.5]),
            ([2.0, 0.0, 0.0], 1.0, [1.0, 0.0, 0.0]),
            ([1.0, 1.0, 0.0, 0.0], 1.0, [0.5, 0.5, 0.0, 0.0]),
            ([5.0, 4.0, -3.0], 2.0, [1.0, 1.0, 0.0]),
        ],
    )
    def test_known_projections(self, v: list[float], n: float, expected: list[float]) -> None:
        np.testing.assert_allclose(project_capped_simplex(v, n), expected, atol=1e-10)

    def test_endpoints(self) -> None:
        v = np.array([0.3, -1.0, 2.0])
        np.testing.assert_array_equal(project_capped_simplex(v, 3), np.ones(3))
        np.testing.assert_array_equal(project_capped_simplex(v, 0), np.zeros(3))

    def test_feasible_and_closest(self) -> None:
        rng = np.random.default_rng(0)
        for _ in range(200):
            m = int(rng.integers(2, 12))
            n = int(rng.integers(1, m))
            v = rng.normal(0.5, 1.5, m)
            x = project_capped_simplex(v, n)

            assert np.all(x >= 0) and np.all(x <= 1)
            assert x.sum() == pytest.approx(n, abs=1e-9)
            # No feasible vertex or interior point is closer to v
            distance = np.linalg.norm(x - v)
            for _ in range(20):
                vertex = np.zeros(m)
                vertex[rng.choice(m, n, replace=False)] = 1.0
                assert distance <= np.linalg.norm(vertex - v) + 1e-9
            assert distance <= np.linalg.norm(np.full(m, n / m) - v) + 1e-9

    def test_feasible_point_is_fixed(self) -> None:
        x = np.array([0.2, 0.9, 0.4, 0.5])
        np.testing.assert_allclose(project_capped_simplex(x, 2.0), x, atol=1e-10)

    @pytest.mark.parametrize("n", [-1, 4])
    def test_sum_out_of_range(self, n: int) -> None:
        with pytest.raises(PreconditionError):
            project_capped_simplex([0.1, 0.2, 0.3], n)
