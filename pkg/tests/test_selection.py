"""Tests for antenna selection strategies."""

import numpy as np
import pytest

from mimo_antsel.channel import gen_iid_rayleigh, normalize
from mimo_antsel.exceptions import CombinatorialLimitError, PreconditionError
from mimo_antsel.models import ChannelTensor, SelectionMask, Strategy
from mimo_antsel.rates import equal_power_log_det
from mimo_antsel.selection import (
    evaluate_selection,
    random_baseline,
    random_masks,
    round_relaxed,
    select_convex,
    select_exhaustive,
    select_power,
    select_random,
)


def top_magnitudes(tensor: ChannelTensor, N: int) -> list[int]:  # noqa: N803
    power = np.abs(tensor.entries[0, 0]) ** 2
    return sorted(int(i) for i in np.argsort(-power)[:N])


class TestSelectConvex:
    """Tests for relaxed selection by projected gradient ascent."""

    def test_full_selection(self, iid_tensor: ChannelTensor) -> None:
        mask, relaxed, _ = select_convex(iid_tensor, iid_tensor.M, 0.5)
        assert mask.N == iid_tensor.M
        np.testing.assert_array_equal(relaxed.values, np.ones(iid_tensor.M))

    def test_single_user_picks_strongest(self) -> None:
        tensor = gen_iid_rayleigh(1, 10, 1, seed=21)
        mask, _, stats = select_convex(tensor, 4, 2.0)
        assert mask.indices == top_magnitudes(tensor, 4)
        assert stats.converged

    def test_relaxed_solution_feasible(self, iid_tensor: ChannelTensor) -> None:
        _, relaxed, _ = select_convex(iid_tensor, 3, 0.5)
        assert np.all(relaxed.values >= -1e-12) and np.all(relaxed.values <= 1 + 1e-12)
        assert relaxed.values.sum() == pytest.approx(3, abs=1e-9)
        assert relaxed.target_N == 3

    def test_relaxation_bounds_rounding(self, iid_tensor: ChannelTensor) -> None:
        mask, relaxed, _ = select_convex(iid_tensor, 4, 0.5)
        _, rounded = equal_power_log_det(iid_tensor, mask, 0.5)
        assert relaxed.objective >= rounded - 1e-6

    def test_objective_never_decreases(self) -> None:
        tensor = normalize(gen_iid_rayleigh(3, 12, 2, seed=4))
        objectives = []
        for cap in range(1, 15):
            _, relaxed, stats = select_convex(tensor, 4, 0.5, max_iters=cap)
            assert np.all(relaxed.values >= -1e-12) and np.all(relaxed.values <= 1 + 1e-12)
            assert relaxed.values.sum() == pytest.approx(4, abs=1e-9)
            objectives.append(relaxed.objective)
            if stats.converged:
                break
        assert len(objectives) > 2
        assert np.all(np.diff(objectives) >= -1e-12)

    def test_better_than_random_on_average(self) -> None:
        tensor = normalize(gen_iid_rayleigh(2, 12, 4, seed=22))
        mask, _, _ = select_convex(tensor, 5, 0.5)
        base = random_baseline(tensor, 5, 0.5, draws=100, seed=22)
        _, objective = equal_power_log_det(tensor, mask, 0.5)
        assert objective >= base.objective_mean - 3 * base.objective_stderr

    def test_near_exhaustive(self) -> None:
        ratios = []
        for seed in range(10):
            tensor = normalize(gen_iid_rayleigh(2, 10, 2, seed=seed))
            for n in (3, 5, 7):
                convex, _, _ = select_convex(tensor, n, 0.5)
                best, _ = select_exhaustive(tensor, n, 0.5)
                ratios.append(
                    equal_power_log_det(tensor, convex, 0.5)[1]
                    / equal_power_log_det(tensor, best, 0.5)[1]
                )
        assert np.mean(ratios) >= 0.99
        assert min(ratios) >= 0.95

    @pytest.mark.slow
    def test_near_exhaustive_on_200_instances(self) -> None:
        ratios = []
        for seed in range(200):
            tensor = normalize(gen_iid_rayleigh(2, 10, 2, seed=1000 + seed))
            for n in (3, 5, 7):
                convex, _, _ = select_convex(tensor, n, 0.5)
                best, _ = select_exhaustive(tensor, n, 0.5)
                ratios.append(
                    equal_power_log_det(tensor, convex, 0.5)[1]
                    / equal_power_log_det(tensor, best, 0.5)[1]
                )
        assert np.mean(ratios) >= 0.99
        assert min(ratios) >= 0.95

    def test_iteration_cap(self, iid_tensor: ChannelTensor) -> None:
        _, _, stats = select_convex(iid_tensor, 3, 0.5, max_iters=1)
        assert stats.iterations == 1
        assert not stats.converged

    @pytest.mark.parametrize("n", [0, 9])
    def test_n_out_of_range(self, iid_tensor: ChannelTensor, n: int) -> None:
        with pytest.raises(PreconditionError):
            select_convex(iid_tensor, n, 0.5)


class TestRoundRelaxed:
    def test_ties_go_to_power_then_index(self) -> None:
        values = np.array([1.0, 0.5, 0.5, 0.5, 0.0])
        power = np.array([1.0, 1.0, 3.0, 1.0, 9.0])
        assert round_relaxed(values, 2, power).indices == [0, 2]
        assert round_relaxed(values, 3, power).indices == [0, 1, 2]


class TestSelectPower:
    def test_ranking(self) -> None:
        tensor = ChannelTensor(entries=np.sqrt([[[0.5, 2.0, 1.0]]]))
        assert select_power(tensor, 2).indices == [1, 2]

    def test_full(self, iid_tensor: ChannelTensor) -> None:
        assert select_power(iid_tensor, iid_tensor.M).N == iid_tensor.M


class TestRandom:
    """Tests for random masks and the random baseline."""

    def test_full_regardless_of_seed(self) -> None:
        for seed in range(5):
            assert select_random(6, 6, seed).indices == list(range(6))

    def test_uniform_over_antennas(self) -> None:
        counts = np.zeros(16)
        for mask in random_masks(16, 8, 1000, seed=3):
            assert mask.N == 8
            counts += mask.active
        sigma = np.sqrt(1000 * 0.5 * 0.5)
        assert np.all(np.abs(counts - 500) <= 3 * sigma)

    def test_first_draw_matches_select_random(self) -> None:
        seed = np.random.SeedSequence([4, 5])
        first = random_masks(10, 5, 3, np.random.SeedSequence([4, 5]))[0]
        assert select_random(10, 5, seed).indices == first.indices

    def test_baseline_deterministic(self, iid_tensor: ChannelTensor) -> None:
        a = random_baseline(iid_tensor, 4, 0.5, draws=15, seed=9)
        b = random_baseline(iid_tensor, 4, 0.5, draws=15, seed=9)
        assert a == b
        assert a.draws == 15
        assert a.zf_mean is not None and a.zf_mean <= a.dpc_mean

    def test_baseline_without_zf_below_k(self) -> None:
        tensor = normalize(gen_iid_rayleigh(3, 6, 2, seed=1))
        base = random_baseline(tensor, 2, 0.5, draws=5, seed=1)
        assert base.zf_mean is None and base.zf_stderr is None

    def test_single_draw_has_zero_stderr(self, iid_tensor: ChannelTensor) -> None:
        base = random_baseline(iid_tensor, 4, 0.5, draws=1, seed=0)
        assert base.dpc_stderr == 0.0

    def test_draws_must_be_positive(self) -> None:
        with pytest.raises(PreconditionError):
            random_masks(4, 2, 0, seed=0)


class TestSelectExhaustive:
    """Tests for the exhaustive oracle."""

    def test_full(self) -> None:
        tensor = gen_iid_rayleigh(2, 4, 2, seed=0)
        mask, stats = select_exhaustive(tensor, 4, 1.0)
        assert mask.indices == [0, 1, 2, 3]
        assert stats.iterations == 1

    def test_single_user_picks_strongest(self) -> None:
        tensor = gen_iid_rayleigh(1, 10, 1, seed=21)
        mask, stats = select_exhaustive(tensor, 4, 2.0)
        assert mask.indices == top_magnitudes(tensor, 4)
        assert stats.iterations == 210

    def test_beats_random_masks(self) -> None:
        tensor = normalize(gen_iid_rayleigh(2, 10, 3, seed=31))
        mask, _ = select_exhaustive(tensor, 5, 0.5)
        _, best = equal_power_log_det(tensor, mask, 0.5)
        for random_mask in random_masks(10, 5, 100, seed=31):
            assert best >= equal_power_log_det(tensor, random_mask, 0.5)[1]

    def test_monotone_in_n(self) -> None:
        tensor = normalize(gen_iid_rayleigh(2, 8, 2, seed=32))
        optimum = [
            equal_power_log_det(tensor, select_exhaustive(tensor, n, 0.5)[0], 0.5)[1]
            for n in range(1, 9)
        ]
        assert np.all(np.diff(optimum) >= -1e-12)

    def test_ties_resolve_to_smallest_indices(self) -> None:
        tensor = ChannelTensor(entries=np.ones((1, 1, 5)))
        mask, _ = select_exhaustive(tensor, 2, 1.0)
        assert mask.indices == [0, 1]

    def test_guard(self) -> None:
        tensor = gen_iid_rayleigh(1, 30, 1, seed=0)
        with pytest.raises(CombinatorialLimitError) as exc_info:
            select_exhaustive(tensor, 15, 1.0)
        assert exc_info.value.count == 155117520
        assert "155117520" in str(exc_info.value)


class TestEvaluateSelection:
    def test_identity_full(self, identity_tensor: ChannelTensor) -> None:
        report = evaluate_selection(identity_tensor, SelectionMask.full(2), 1.0)
        assert report.dpc.mean == pytest.approx(2.0, rel=1e-10)
        assert report.zf is not None
        assert report.zf.mean == pytest.approx(2.0, rel=1e-10)

    def test_dpc_bounds_zf(self, iid_tensor: ChannelTensor) -> None:
        mask = select_power(iid_tensor, 4)
        report = evaluate_selection(iid_tensor, mask, 0.5, Strategy.POWER)
        assert report.strategy is Strategy.POWER
        assert report.mask.indices == mask.indices
        assert report.zf is not None and report.dpc.mean >= report.zf.mean

    def test_no_zf_below_k(self) -> None:
        tensor = normalize(gen_iid_rayleigh(3, 6, 2, seed=1))
        report = evaluate_selection(tensor, SelectionMask.from_indices([0, 1], 6), 0.5)
        assert report.zf is None

    @pytest.mark.slow
    def test_iid_selection_gain_is_small(self) -> None:
        gains = []
        for seed in range(20):
            tensor = normalize(gen_iid_rayleigh(4, 64, 16, seed=seed))
            mask, _, _ = select_convex(tensor, 32, 10 ** -0.5)
            dpc = evaluate_selection(tensor, mask, 10 ** -0.5).dpc.mean
            base = random_baseline(tensor, 32, 10 ** -0.5, draws=50, seed=seed)
            gains.append(100 * (dpc - base.dpc_mean) / base.dpc_mean)
        assert np.mean(gains) < 5.0
