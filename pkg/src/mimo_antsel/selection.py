"""Antenna selection strategies and their evaluation.

Every strategy picks one set of N active antennas shared by all subcarriers. Convex and
Exhaustive maximize the equal-power objective log2 det(I + rho H Delta H^H) averaged over
subcarriers; Power ranks antennas by average received power; Random draws uniformly.
Rates of the resulting masks are then computed with optimized power allocation.
"""

import itertools
import math
import time

import numpy as np
import structlog
from numpy.typing import NDArray

from .channel import per_antenna_avg_power
from .exceptions import CombinatorialLimitError, PreconditionError
from .models import (
    ChannelTensor,
    RandomBaseline,
    RelaxedDelta,
    SelectionMask,
    SelectionReport,
    SolverStats,
    Strategy,
)
from .projection import project_capped_simplex
from .rates import (
    DPC_MAX_ITERS,
    DPC_TOL,
    dpc_sum_capacity,
    equal_power_log_det,
    log2det_hpd,
    relaxed_gradient,
    zf_sum_rate,
)

logger = structlog.get_logger(__name__)

CONVEX_MAX_ITERS = 2000
CONVEX_GRAD_TOL = 1e-6
ARMIJO_SIGMA = 1e-4
ARMIJO_SHRINK = 0.5
INITIAL_STEP = 1.0
MIN_STEP = 1e-12
EXHAUSTIVE_LIMIT = 1_000_000
EXHAUSTIVE_CHUNK = 2048
RANDOM_DRAWS = 200


def _check_n(N: int, M: int) -> None:  # noqa: N803
    if not 1 <= N <= M:
        raise PreconditionError(f"N must satisfy 1 <= N <= M={M}, got N={N}")


def round_relaxed(
    values: NDArray[np.float64],
    N: int,  # noqa: N803
    power: NDArray[np.float64],
) -> SelectionMask:
    """Keep the N largest relaxed values.

    Ties at the cut are broken by higher per-antenna average power, then lower index.
    """
    M = values.size  # noqa: N806
    order = np.lexsort((np.arange(M), -power, -values))
    return SelectionMask.from_indices(np.sort(order[:N]), M)


def select_convex(
    tensor: ChannelTensor,
    N: int,  # noqa: N803
    rho: float,
    max_iters: int = CONVEX_MAX_ITERS,
    grad_tol: float = CONVEX_GRAD_TOL,
) -> tuple[SelectionMask, RelaxedDelta, SolverStats]:
    """Select antennas by solving the relaxed selection problem and rounding.

    Maximizes mean_l log2 det(I + rho H_l Delta H_l^H) over {0 <= Delta_i <= 1,
    sum(Delta) = N} by projected gradient ascent with Armijo backtracking, starting from
    Delta = N/M everywhere, then keeps the N largest entries.

    Args:
        tensor: Normalized channel tensor
        N: Number of antennas to activate
        rho: Linear transmit SNR per user
        max_iters: Iteration cap for the ascent
        grad_tol: Stop once the projected-gradient norm drops below this

    Returns:
        Binary mask, relaxed solution and solver statistics

    Raises:
        PreconditionError: If N is outside [1, M]
    """
    M = tensor.M  # noqa: N806
    _check_n(N, M)
    started = time.perf_counter()
    power = per_antenna_avg_power(tensor)

    if N == M:
        delta = np.ones(M)
        _, value = equal_power_log_det(tensor, delta, rho)
        stats = SolverStats(wall_ms=(time.perf_counter() - started) * 1e3)
        return (
            SelectionMask.full(M),
            RelaxedDelta(values=delta, target_N=N, objective=value),
            stats,
        )

    delta = np.full(M, N / M)
    _, value = equal_power_log_det(tensor, delta, rho)
    grad_norm = float("inf")
    converged = False
    stalled = False
    iterations = 0

    while iterations < max_iters:
        grad = relaxed_gradient(tensor, delta, rho)
        grad_norm = float(np.linalg.norm(project_capped_simplex(delta + grad, N) - delta))
        if grad_norm < grad_tol:
            converged = True
            break

        iterations += 1
        step = INITIAL_STEP
        while step >= MIN_STEP:
            candidate = project_capped_simplex(delta + step * grad, N)
            _, candidate_value = equal_power_log_det(tensor, candidate, rho)
            if candidate_value >= value + ARMIJO_SIGMA * float(grad @ (candidate - delta)):
                break
            step *= ARMIJO_SHRINK
        else:
            stalled = True
            break

        delta, value = candidate, candidate_value

    if not converged:
        logger.warning(
            "convex_not_converged",
            N=N,
            iterations=iterations,
            grad_norm=grad_norm,
            stalled=stalled,
        )

    stats = SolverStats(
        iterations=iterations,
        grad_norm=grad_norm,
        wall_ms=(time.perf_counter() - started) * 1e3,
        converged=converged,
    )
    relaxed = RelaxedDelta(values=delta, target_N=N, objective=value)
    return round_relaxed(delta, N, power), relaxed, stats


def select_power(tensor: ChannelTensor, N: int) -> SelectionMask:  # noqa: N803
    """Select the N antennas with the highest average received power.

    Uses only the per-antenna power statistic, no channel phases. Ties go to the lower index.

    Raises:
        PreconditionError: If N is outside [1, M]
    """
    _check_n(N, tensor.M)
    power = per_antenna_avg_power(tensor)
    order = np.lexsort((np.arange(tensor.M), -power))
    return SelectionMask.from_indices(np.sort(order[:N]), tensor.M)


def _draw(rng: np.random.Generator, M: int, N: int) -> SelectionMask:  # noqa: N803
    return SelectionMask.from_indices(rng.choice(M, size=N, replace=False), M)


def select_random(
    M: int,  # noqa: N803
    N: int,  # noqa: N803
    seed: int | np.random.SeedSequence,
) -> SelectionMask:
    """Draw a uniformly random N-subset of M antennas."""
    _check_n(N, M)
    return _draw(np.random.default_rng(seed), M, N)


def random_masks(
    M: int,  # noqa: N803
    N: int,  # noqa: N803
    draws: int,
    seed: int | np.random.SeedSequence,
) -> list[SelectionMask]:
    """Draw `draws` independent uniform N-subsets from a single seeded stream."""
    _check_n(N, M)
    if draws < 1:
        raise PreconditionError(f"draws must be >= 1, got {draws}")
    rng = np.random.default_rng(seed)
    return [_draw(rng, M, N) for _ in range(draws)]


def _mean_and_stderr(samples: list[float]) -> tuple[float, float]:
    arr = np.asarray(samples, dtype=np.float64)
    if arr.size < 2:
        return float(arr.mean()), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def random_baseline(
    tensor: ChannelTensor,
    N: int,  # noqa: N803
    rho: float,
    draws: int = RANDOM_DRAWS,
    seed: int | np.random.SeedSequence = 0,
    dpc_max_iters: int = DPC_MAX_ITERS,
    dpc_tol: float = DPC_TOL,
) -> RandomBaseline:
    """Average DPC, ZF and equal-power objective over random masks.

    ZF is only evaluated when N >= K.

    Raises:
        PreconditionError: If N is outside [1, M] or draws < 1
    """
    dpc, zf, objective = [], [], []
    for mask in random_masks(tensor.M, N, draws, seed):
        dpc.append(dpc_sum_capacity(tensor, mask, rho, dpc_max_iters, dpc_tol).mean)
        objective.append(equal_power_log_det(tensor, mask, rho)[1])
        if N >= tensor.K:
            zf.append(zf_sum_rate(tensor, mask, rho).mean)

    dpc_mean, dpc_stderr = _mean_and_stderr(dpc)
    objective_mean, objective_stderr = _mean_and_stderr(objective)
    zf_mean, zf_stderr = _mean_and_stderr(zf) if zf else (None, None)
    return RandomBaseline(
        dpc_mean=dpc_mean,
        dpc_stderr=dpc_stderr,
        zf_mean=zf_mean,
        zf_stderr=zf_stderr,
        objective_mean=objective_mean,
        objective_stderr=objective_stderr,
        draws=draws,
    )


def _subset_objectives(
    tensor: ChannelTensor, subsets: NDArray[np.intp], rho: float
) -> NDArray[np.float64]:
    """Equal-power mean log-det for a batch of index subsets, shape (C, N)."""
    cols = tensor.entries[:, :, subsets]  # (L, K, C, N)
    g = np.einsum("lkcn,ljcn->clkj", cols, cols.conj())
    eye = np.eye(tensor.K)
    return np.asarray(log2det_hpd(eye + rho * g).mean(axis=1), dtype=np.float64)


def select_exhaustive(
    tensor: ChannelTensor,
    N: int,  # noqa: N803
    rho: float,
    limit: float = EXHAUSTIVE_LIMIT,
) -> tuple[SelectionMask, SolverStats]:
    """Best N-subset by enumeration of all binomial(M, N) candidates.

    Subsets are visited in lexicographic order and only strict improvements replace
    the incumbent, so ties resolve to the lexicographically smallest index set.

    Raises:
        PreconditionError: If N is outside [1, M]
        CombinatorialLimitError: If binomial(M, N) exceeds limit
    """
    M = tensor.M  # noqa: N806
    _check_n(N, M)
    count = math.comb(M, N)
    if count > limit:
        raise CombinatorialLimitError(count, int(limit))

    started = time.perf_counter()
    best_value = -np.inf
    best: tuple[int, ...] = tuple(range(N))
    combos = itertools.combinations(range(M), N)
    while chunk := list(itertools.islice(combos, EXHAUSTIVE_CHUNK)):
        values = _subset_objectives(tensor, np.asarray(chunk, dtype=np.intp), rho)
        idx = int(np.argmax(values))
        if values[idx] > best_value:
            best_value = float(values[idx])
            best = chunk[idx]

    stats = SolverStats(iterations=count, wall_ms=(time.perf_counter() - started) * 1e3)
    logger.debug("exhaustive_done", N=N, subsets=count, objective=best_value)
    return SelectionMask.from_indices(list(best), M), stats


def evaluate_selection(
    tensor: ChannelTensor,
    mask: SelectionMask,
    rho: float,
    strategy: Strategy = Strategy.CONVEX,
    solver_stats: SolverStats | None = None,
    dpc_max_iters: int = DPC_MAX_ITERS,
    dpc_tol: float = DPC_TOL,
) -> SelectionReport:
    """Compute the DPC capacity, ZF sum-rate (when N >= K) and objective of a mask."""
    dpc = dpc_sum_capacity(tensor, mask, rho, dpc_max_iters, dpc_tol)
    zf = zf_sum_rate(tensor, mask, rho) if mask.N >= tensor.K else None
    _, objective = equal_power_log_det(tensor, mask, rho)
    return SelectionReport(
        mask=mask,
        strategy=strategy,
        dpc=dpc,
        zf=zf,
        objective=objective,
        solver_stats=solver_stats or SolverStats(),
    )
