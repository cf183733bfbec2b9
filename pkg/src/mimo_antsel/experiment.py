"""Scenario sweeps: selection per (strategy, N), gains over random, n90 and sanity checks."""

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import structlog

from .channel import normalize
from .config import ScenarioConfig, Settings, get_settings
from .exceptions import DomainError
from .models import (
    ChannelTensor,
    PowerLoss,
    RandomBaseline,
    SelectionMask,
    SelectionReport,
    SolverStats,
    Strategy,
    SweepResult,
    SweepRow,
)
from .selection import (
    evaluate_selection,
    random_baseline,
    select_convex,
    select_exhaustive,
    select_power,
    select_random,
)
from .sources import ChannelSourceFactory

logger = structlog.get_logger(__name__)

N90_FRACTION = 0.9
SMALL_GRID_MAX_M = 32
GRID_POINTS = 16
SANITY_SIGMAS = 3.0
SANITY_TOL = 1e-6


def gain_vs_random(adaptive: float, baseline: float) -> float:
    """Percentage gain of an adaptive selection over the random baseline.

    Raises:
        DomainError: If baseline is not positive
    """
    if not math.isfinite(baseline) or baseline <= 0:
        raise DomainError(f"baseline must be positive, got {baseline}")
    return 100.0 * (adaptive - baseline) / baseline


def loss_vs_reference(candidate: float, reference: float) -> float:
    """Percentage loss of a candidate rate relative to a reference rate.

    Raises:
        DomainError: If reference is not positive
    """
    if not math.isfinite(reference) or reference <= 0:
        raise DomainError(f"reference must be positive, got {reference}")
    return 100.0 * (reference - candidate) / reference


def n90(ns: Sequence[int], rates: Sequence[float], full_rate: float) -> int:
    """Smallest sampled N whose rate reaches 90% of the full-array rate.

    No interpolation between grid points. Returns the largest sampled N if no sample
    qualifies.
    """
    if not ns:
        raise DomainError("n90 needs at least one sampled N")
    pairs = sorted(zip(ns, rates, strict=True))
    for n, rate in pairs:
        if rate >= N90_FRACTION * full_rate:
            return int(n)
    return int(pairs[-1][0])


def default_n_grid(K: int, M: int) -> list[int]:  # noqa: N803
    """Every N from K to M for small arrays, otherwise 16 evenly spaced values."""
    if M <= SMALL_GRID_MAX_M:
        return list(range(K, M + 1))
    grid = np.unique(np.round(np.linspace(K, M, GRID_POINTS)).astype(int))
    return [int(n) for n in grid]


def baseline_seed(seed: int, N: int) -> np.random.SeedSequence:  # noqa: N803
    """Seed of the random masks at N; shared by every strategy's comparison."""
    return np.random.SeedSequence([seed, N])


class _Sweep:
    """Per-run state shared by the worker threads (read-only once built)."""

    def __init__(
        self,
        config: ScenarioConfig,
        settings: Settings,
        tensor: ChannelTensor,
        draws: int,
        record_timings: bool,
    ):
        self.config = config
        self.settings = settings
        self.tensor = tensor
        self.draws = draws
        self.record_timings = record_timings
        self.baselines: dict[int, RandomBaseline] = {}

    def baseline(self, N: int) -> RandomBaseline:  # noqa: N803
        return random_baseline(
            self.tensor,
            N,
            self.config.rho,
            self.draws,
            baseline_seed(self.config.seed, N),
            self.settings.dpc_max_iters,
            self.settings.dpc_tol,
        )

    def select(self, strategy: Strategy, N: int) -> tuple[SelectionMask, SolverStats]:  # noqa: N803
        tensor, rho = self.tensor, self.config.rho
        match strategy:
            case Strategy.CONVEX:
                mask, _, stats = select_convex(
                    tensor,
                    N,
                    rho,
                    self.settings.convex_max_iters,
                    self.settings.convex_grad_tol,
                )
                return mask, stats
            case Strategy.EXHAUSTIVE:
                return select_exhaustive(tensor, N, rho, self.settings.exhaustive_limit)
            case Strategy.POWER:
                return select_power(tensor, N), SolverStats()
            case Strategy.RANDOM:
                seed = baseline_seed(self.config.seed, N)
                return select_random(tensor.M, N, seed), SolverStats()
        raise ValueError(f"Unknown strategy: {strategy}")

    def report(self, strategy: Strategy, N: int) -> SelectionReport:  # noqa: N803
        mask, stats = self.select(strategy, N)
        return evaluate_selection(
            self.tensor,
            mask,
            self.config.rho,
            strategy,
            stats,
            self.settings.dpc_max_iters,
            self.settings.dpc_tol,
        )

    def row(self, report: SelectionReport, N: int) -> SweepRow:  # noqa: N803
        """Turn a report into a CSV row; Random rows carry the baseline means."""
        base = self.baselines[N]
        if report.strategy is Strategy.RANDOM:
            dpc_mean, zf_mean, objective = base.dpc_mean, base.zf_mean, base.objective_mean
        else:
            dpc_mean = report.dpc.mean
            zf_mean = report.zf.mean if report.zf is not None else None
            objective = report.objective

        zf_gain = None
        if zf_mean is not None and base.zf_mean is not None:
            zf_gain = gain_vs_random(zf_mean, base.zf_mean)
        iters = (
            report.solver_stats.iterations
            if report.strategy in (Strategy.CONVEX, Strategy.EXHAUSTIVE)
            else 0
        )
        return SweepRow(
            scenario=self.config.name,
            strategy=report.strategy,
            N=N,
            dpc_mean=dpc_mean,
            zf_mean=zf_mean,
            dpc_gain_pct=gain_vs_random(dpc_mean, base.dpc_mean),
            zf_gain_pct=zf_gain,
            objective=objective,
            iters=iters,
            wall_ms=report.solver_stats.wall_ms if self.record_timings else 0.0,
            indices=report.mask.indices,
        )


def _cells(config: ScenarioConfig, ns: list[int], limit: float) -> list[tuple[Strategy, int]]:
    cells = []
    for strategy in config.strategies:
        for n in ns:
            if strategy is Strategy.EXHAUSTIVE and math.comb(config.M, n) > limit:
                logger.warning("exhaustive_skipped", N=n, subsets=math.comb(config.M, n))
                continue
            cells.append((strategy, n))
    return cells


def sanity_checks(rows: list[SweepRow], baselines: dict[int, RandomBaseline]) -> list[str]:
    """Cross-strategy consistency of a sweep; returns one message per violation.

    ZF must not exceed DPC in any cell. In the equal-power objective, Exhaustive must not
    fall below Convex, and Convex must not fall below the random mean by more than 3
    standard errors.
    """
    violations = []
    by_cell = {(r.strategy, r.N): r for r in rows}
    for r in rows:
        if r.zf_mean is not None and r.zf_mean > r.dpc_mean + SANITY_TOL:
            violations.append(f"{r.strategy} N={r.N}: ZF {r.zf_mean:.6g} > DPC {r.dpc_mean:.6g}")

    for (strategy, n), convex in by_cell.items():
        if strategy is not Strategy.CONVEX:
            continue
        exhaustive = by_cell.get((Strategy.EXHAUSTIVE, n))
        if exhaustive is not None and exhaustive.objective < convex.objective - SANITY_TOL:
            violations.append(
                f"N={n}: exhaustive objective {exhaustive.objective:.6g} "
                f"< convex {convex.objective:.6g}"
            )
        base = baselines.get(n)
        if base is not None:
            floor = base.objective_mean - SANITY_SIGMAS * base.objective_stderr
            if convex.objective < floor - SANITY_TOL:
                violations.append(
                    f"N={n}: convex objective {convex.objective:.6g} "
                    f"< random mean {base.objective_mean:.6g} - 3 stderr"
                )

    for message in violations:
        logger.warning("sanity_violation", message=message)
    return violations


def _power_loss(rows: list[SweepRow]) -> list[PowerLoss]:
    convex = {r.N: r for r in rows if r.strategy is Strategy.CONVEX}
    losses = []
    for r in sorted((r for r in rows if r.strategy is Strategy.POWER), key=lambda r: r.N):
        ref = convex.get(r.N)
        if ref is None:
            continue
        zf_loss = None
        if r.zf_mean is not None and ref.zf_mean is not None:
            zf_loss = loss_vs_reference(r.zf_mean, ref.zf_mean)
        dpc_loss = loss_vs_reference(r.dpc_mean, ref.dpc_mean)
        losses.append(PowerLoss(N=r.N, dpc_loss_pct=dpc_loss, zf_loss_pct=zf_loss))
    return losses


def load_tensor(config: ScenarioConfig) -> ChannelTensor:
    """Load the scenario's channel and normalize it as configured."""
    raw = ChannelSourceFactory.get_source(config.channel_source).load(config)
    return normalize(raw, config.normalization)


def run_scenario(
    config: ScenarioConfig,
    settings: Settings | None = None,
    threads: int | None = None,
    record_timings: bool | None = None,
) -> SweepResult:
    """Run the N sweep of a scenario.

    The channel is generated or loaded once and shared read-only by all cells. Random
    baselines are drawn per N from a seed derived from (config.seed, N), so every strategy
    is compared against the same masks. Cells may run on several threads; rows are
    collected in (strategy, N) order regardless.

    Args:
        config: Validated scenario
        settings: Solver and experiment settings; defaults to get_settings()
        threads: Worker threads, overriding settings.threads
        record_timings: Keep wall-clock times in rows, overriding settings.record_timings

    Returns:
        Rows, baselines and derived metrics

    Raises:
        ConfigError: If the channel source does not match the scenario
        ChannelFormatError: If a channel file is invalid
        NumericError: If a rate computation fails
    """
    settings = settings or get_settings()
    threads = threads or settings.threads
    timings = settings.record_timings if record_timings is None else record_timings
    draws = config.random_draws or settings.random_draws
    grid = config.n_sweep or default_n_grid(config.K, config.M)
    ns = sorted(set(grid) | set(config.report_points))

    logger.info(
        "scenario_started",
        scenario=config.name,
        K=config.K,
        M=config.M,
        L=config.L,
        rho_db=config.rho_db,
        grid=ns,
        threads=threads,
    )
    tensor = load_tensor(config)
    sweep = _Sweep(config, settings, tensor, draws, timings)
    cells = _cells(config, ns, settings.exhaustive_limit)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        sweep.baselines = dict(zip(ns, pool.map(sweep.baseline, ns), strict=True))
        reports = list(pool.map(lambda cell: sweep.report(*cell), cells))

    rows = []
    for (strategy, n), report in zip(cells, reports, strict=True):
        rows.append(sweep.row(report, n))
        logger.debug("cell_completed", strategy=strategy.value, N=n, dpc=rows[-1].dpc_mean)

    full = evaluate_selection(
        tensor,
        SelectionMask.full(config.M),
        config.rho,
        dpc_max_iters=settings.dpc_max_iters,
        dpc_tol=settings.dpc_tol,
    )
    result = SweepResult(
        scenario=config.name,
        K=config.K,
        M=config.M,
        rows=rows,
        baselines=sweep.baselines,
        power_loss=_power_loss(rows),
        sanity_violations=sanity_checks(rows, sweep.baselines),
    )
    for strategy in config.strategies:
        strategy_rows = result.rows_for(strategy)
        if not strategy_rows:
            continue
        grid = [r.N for r in strategy_rows]
        result.n90_dpc[strategy] = n90(grid, [r.dpc_mean for r in strategy_rows], full.dpc.mean)
        if full.zf is not None and all(r.zf_mean is not None for r in strategy_rows):
            zf_rates = [float(r.zf_mean) for r in strategy_rows if r.zf_mean is not None]
            result.n90_zf[strategy] = n90(grid, zf_rates, full.zf.mean)
        points = {r.N: (r.dpc_gain_pct, r.zf_gain_pct) for r in strategy_rows}
        result.report_points[strategy] = {
            n: points[n] for n in config.report_points if n in points
        }

    logger.info(
        "scenario_completed",
        scenario=config.name,
        rows=len(rows),
        n90_dpc={s.value: n for s, n in result.n90_dpc.items()},
        sanity_violations=len(result.sanity_violations),
    )
    return result
