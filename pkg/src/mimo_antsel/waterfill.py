"""Exact active-set waterfilling."""

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import DomainError


def waterfill(gains: ArrayLike, budget: float) -> NDArray[np.float64]:
    """Maximize sum(log2(1 + g_i * p_i)) subject to sum(p_i) = budget, p_i >= 0.

    The solution has the form p_i = max(0, mu - 1/g_i). The water level mu is found
    exactly by walking the active set over 1/g_i sorted ascending.

    Args:
        gains: Positive, finite channel gains
        budget: Positive power budget

    Returns:
        Power allocation with the same length as gains

    Raises:
        DomainError: If a gain is nonpositive or non-finite, or budget <= 0
    """
    g = np.asarray(gains, dtype=np.float64).reshape(-1)
    if g.size == 0:
        raise DomainError("waterfill needs at least one gain")
    if not np.all(np.isfinite(g)) or np.any(g <= 0):
        raise DomainError(f"waterfill gains must be finite and positive, got {g.tolist()}")
    if not np.isfinite(budget) or budget <= 0:
        raise DomainError(f"waterfill budget must be positive, got {budget}")

    return waterfill_batch(g[np.newaxis, :], budget)[0]


def water_level(gains: ArrayLike, budget: float) -> float:
    """Water level mu of the waterfilling solution (for KKT checks)."""
    g = np.asarray(gains, dtype=np.float64).reshape(-1)
    p = waterfill(g, budget)
    active = p > 0
    return float(np.mean(p[active] + 1.0 / g[active]))


def waterfill_batch(gains: NDArray[np.float64], budget: float) -> NDArray[np.float64]:
    """Row-wise waterfilling over an (L, n) array of nonnegative gains.

    Zero gains are treated as channels that are never switched on. Every row must
    contain at least one positive gain.
    """
    g = np.asarray(gains, dtype=np.float64)
    with np.errstate(divide="ignore"):
        inv = np.where(g > 0, 1.0 / np.where(g > 0, g, 1.0), np.inf)

    order = np.argsort(inv, axis=1, kind="stable")
    inv_sorted = np.take_along_axis(inv, order, axis=1)
    n = np.arange(1, g.shape[1] + 1, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        levels = (budget + np.cumsum(inv_sorted, axis=1)) / n
        # The feasible active sets form a prefix of the sorted order
        feasible = levels > inv_sorted
    count = np.count_nonzero(feasible, axis=1)
    if np.any(count == 0):
        raise DomainError("waterfill row has no positive gain")

    mu = np.take_along_axis(levels, (count - 1)[:, np.newaxis], axis=1)
    p = np.maximum(mu - inv, 0.0)
    p[~np.isfinite(inv)] = 0.0
    return p
