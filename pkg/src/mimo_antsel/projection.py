"""Euclidean projection onto the capped simplex {0 <= x <= 1, sum(x) = n}."""

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import PreconditionError

SUM_TOL = 1e-10
MAX_BISECTIONS = 200


def project_capped_simplex(v: ArrayLike, n: float) -> NDArray[np.float64]:
    """Project v onto {x : 0 <= x_i <= 1, sum(x) = n}.

    The projection is clip(v - tau, 0, 1) for the shift tau that meets the sum
    constraint. tau is bracketed and bisected until the sum is within SUM_TOL, then
    recomputed in closed form from the entries strictly inside (0, 1).

    Raises:
        PreconditionError: If n lies outside [0, len(v)]
    """
    x = np.asarray(v, dtype=np.float64).reshape(-1)
    size = x.size
    if not 0 <= n <= size:
        raise PreconditionError(f"cannot project onto sum {n} with {size} entries")
    if n == size:
        return np.ones(size)
    if n == 0:
        return np.zeros(size)

    def excess(tau: float) -> float:
        return float(np.clip(x - tau, 0.0, 1.0).sum() - n)

    # excess(lo) = size - n > 0 and excess(hi) = -n < 0
    lo, hi = float(x.min()) - 1.0, float(x.max())
    tau = 0.5 * (lo + hi)
    for _ in range(MAX_BISECTIONS):
        tau = 0.5 * (lo + hi)
        gap = excess(tau)
        if abs(gap) <= SUM_TOL:
            break
        if gap > 0:
            lo = tau
        else:
            hi = tau

    projected = np.clip(x - tau, 0.0, 1.0)
    free = (projected > 0.0) & (projected < 1.0)
    if np.any(free):
        ones = np.count_nonzero(projected >= 1.0)
        tau = float((x[free].sum() - (n - ones)) / np.count_nonzero(free))
        refined = np.clip(x - tau, 0.0, 1.0)
        if abs(refined.sum() - n) <= abs(projected.sum() - n):
            projected = refined
    return projected
