"""DPC sum-capacity, ZF sum-rate and the equal-power log-det objective.

All quantities are computed on the K x K side of Sylvester's determinant identity,
det(I_N + H^H D H) = det(I_K + D^(1/2) H H^H D^(1/2)), and vectorized over subcarriers.
"""

from enum import StrEnum

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray

from .exceptions import DomainError, NumericError, PreconditionError, SingularChannelError
from .models import (
    AllocationKind,
    ChannelTensor,
    PowerAllocation,
    RateResult,
    Scheme,
    SelectionMask,
)
from .waterfill import waterfill_batch

logger = structlog.get_logger(__name__)

DPC_MAX_ITERS = 500
DPC_TOL = 1e-8
MAX_CONDITION = 1e12
LN2 = float(np.log(2.0))


class SnrScheme(StrEnum):
    ZF = "ZF"
    SINGLE_USER = "SingleUser"


def gram(
    h: NDArray[np.complex128], delta: NDArray[np.float64] | None = None
) -> NDArray[np.complex128]:
    """Batched H diag(delta) H^H for h of shape (L, K, N)."""
    if delta is None:
        return np.einsum("lkn,ljn->lkj", h, h.conj())
    return np.einsum("lkn,n,ljn->lkj", h, delta, h.conj())


def log2det_hpd(a: NDArray[np.complex128]) -> NDArray[np.float64]:
    """log2 det of a batch of Hermitian positive-definite matrices via Cholesky."""
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"matrix is not positive definite: {e}") from e
    diag = np.real(np.diagonal(chol, axis1=-2, axis2=-1))
    return np.asarray(2.0 * np.sum(np.log2(diag), axis=-1), dtype=np.float64)


def _check_rho(rho: float) -> None:
    if not np.isfinite(rho) or rho <= 0:
        raise DomainError(f"rho must be positive and finite, got {rho}")


def _dpc_objective(g: NDArray[np.complex128], power: NDArray[np.float64]) -> NDArray[np.float64]:
    """log2 det(I + D^(1/2) G D^(1/2)) per subcarrier, D = diag(power)."""
    root = np.sqrt(power)
    eye = np.eye(g.shape[-1])
    return log2det_hpd(eye + root[:, :, np.newaxis] * g * root[:, np.newaxis, :])


def _effective_gains(
    g: NDArray[np.complex128], power: NDArray[np.float64], scale: float
) -> NDArray[np.float64]:
    """Per-user gain seen through the interference of all other users.

    For user k this is scale * h_k (I + sum_{j != k} a_j h_j^H h_j)^-1 h_k^H with
    a_j = scale * P_j, evaluated with the push-through identity and Sherman-Morrison.
    """
    a = scale * power
    eye = np.eye(g.shape[-1])
    s = np.linalg.solve(eye + g * a[:, np.newaxis, :], g)
    s_diag = np.real(np.diagonal(s, axis1=-2, axis2=-1))
    return np.asarray(scale * s_diag / (1.0 - a * s_diag), dtype=np.float64)


def dpc_sum_capacity(
    tensor: ChannelTensor,
    mask: SelectionMask,
    rho: float,
    max_iters: int = DPC_MAX_ITERS,
    tol: float = DPC_TOL,
) -> RateResult:
    """DPC sum-capacity per subcarrier via sum-power iterative waterfilling.

    Solves max over diagonal P (trace 1) of log2 det(I + rho*K * P H Delta H^H) on the
    dual uplink. Each iteration waterfills the users' effective gains and keeps the better
    of the full update and the update averaged with the previous iterate with weight 1/K,
    so the objective never decreases.

    Raises:
        PreconditionError: If no antenna is active
        DomainError: If rho is not positive
        NumericError: If the arithmetic produces NaN
    """
    _check_rho(rho)
    if mask.N < 1:
        raise PreconditionError("DPC needs at least one active antenna")
    h = tensor.masked(mask)
    K = tensor.K  # noqa: N806
    scale = rho * K
    g = gram(h)

    power = np.full((tensor.L, K), 1.0 / K)
    value = _dpc_objective(g * scale, power)
    active = np.ones(tensor.L, dtype=bool)
    iterations = 0

    while iterations < max_iters and np.any(active):
        iterations += 1
        idx = np.flatnonzero(active)
        gains = _effective_gains(g[idx], power[idx], scale)
        if not np.all(np.isfinite(gains)):
            raise NumericError("DPC effective gains are not finite")
        # Subcarriers where every selected antenna is silent keep log2 det(I) = 0
        dead = ~np.any(gains > 0, axis=1)
        if np.any(dead):
            active[idx[dead]] = False
            idx, gains = idx[~dead], gains[~dead]
            if idx.size == 0:
                break

        full = waterfill_batch(np.maximum(gains, 0.0), 1.0)
        averaged = power[idx] + (full - power[idx]) / K
        full_value = _dpc_objective(g[idx] * scale, full)
        averaged_value = _dpc_objective(g[idx] * scale, averaged)

        take_full = full_value >= averaged_value
        candidate = np.where(take_full[:, np.newaxis], full, averaged)
        candidate_value = np.where(take_full, full_value, averaged_value)

        improved = candidate_value > value[idx]
        increment = np.where(improved, candidate_value - value[idx], 0.0)
        power[idx[improved]] = candidate[improved]
        value[idx[improved]] = candidate_value[improved]
        active[idx[increment < tol]] = False

    if np.any(~np.isfinite(value)):
        raise NumericError("DPC capacity is not finite")
    converged = not np.any(active)
    if not converged:
        logger.warning(
            "dpc_not_converged",
            iterations=iterations,
            unconverged_subcarriers=int(np.count_nonzero(active)),
        )

    allocation = PowerAllocation(kind=AllocationKind.DPC_POWER, values=power, rho=rho, K=K)
    return RateResult(
        scheme=Scheme.DPC,
        per_subcarrier=np.maximum(value, 0.0),
        allocation=allocation,
        iterations=iterations,
        converged=converged,
    )


def inverse_gram_diagonal(h: NDArray[np.complex128]) -> NDArray[np.float64]:
    """Diagonal of (H H^H)^-1 per subcarrier, the ZF power penalties.

    Raises:
        SingularChannelError: If a Gram matrix has condition number above 1e12
    """
    g = gram(h)
    condition = np.linalg.cond(g)
    bad = np.flatnonzero(~np.isfinite(condition) | (condition > MAX_CONDITION))
    if bad.size:
        raise SingularChannelError(int(bad[0]), float(condition[bad[0]]))
    inv = np.linalg.inv(g)
    return np.asarray(np.real(np.diagonal(inv, axis1=-2, axis2=-1)), dtype=np.float64)


def zf_sum_rate(tensor: ChannelTensor, mask: SelectionMask, rho: float) -> RateResult:
    """ZF sum-rate per subcarrier with waterfilled received SNRs.

    Maximizes sum_i log2(1 + rho*K*Q_i) subject to sum_i Q_i c_i = 1, where c_i is the
    i-th diagonal of the inverse masked Gram matrix. Substituting q_i = Q_i c_i turns this
    into waterfilling with gains rho*K / c_i and unit budget.

    Raises:
        PreconditionError: If fewer antennas than users are active
        SingularChannelError: If a masked Gram matrix is ill-conditioned
    """
    _check_rho(rho)
    K = tensor.K  # noqa: N806
    if mask.N < K:
        raise PreconditionError(f"ZF needs N >= K, got N={mask.N}, K={K}")
    c = inverse_gram_diagonal(tensor.masked(mask))
    gains = rho * K / c
    q = waterfill_batch(gains, 1.0)
    per_subcarrier = np.sum(np.log2(1.0 + gains * q), axis=1)
    allocation = PowerAllocation(kind=AllocationKind.ZF_SNR, values=q / c, rho=rho, K=K)
    return RateResult(scheme=Scheme.ZF, per_subcarrier=per_subcarrier, allocation=allocation)


def _as_delta(tensor: ChannelTensor, delta: SelectionMask | ArrayLike) -> NDArray[np.float64]:
    if isinstance(delta, SelectionMask):
        values = delta.as_delta()
    else:
        values = np.asarray(delta, dtype=np.float64).reshape(-1)
    if values.size != tensor.M:
        raise DomainError(f"delta has {values.size} entries, channel has {tensor.M} antennas")
    if np.any(~np.isfinite(values)) or np.any(values < 0) or np.any(values > 1):
        raise DomainError("delta entries must lie in [0, 1]")
    return values


def equal_power_log_det(
    tensor: ChannelTensor, delta: SelectionMask | ArrayLike, rho: float
) -> tuple[NDArray[np.float64], float]:
    """Equal-power objective log2 det(I + rho H Delta H^H) per subcarrier and its mean.

    Accepts a binary mask or a relaxed delta with entries in [0, 1].

    Raises:
        DomainError: If delta leaves [0, 1] or rho is not positive
    """
    _check_rho(rho)
    values = _as_delta(tensor, delta)
    eye = np.eye(tensor.K)
    per_subcarrier = log2det_hpd(eye + rho * gram(tensor.entries, values))
    return per_subcarrier, float(np.mean(per_subcarrier))


def relaxed_gradient(
    tensor: ChannelTensor, delta: ArrayLike, rho: float
) -> NDArray[np.float64]:
    """Gradient of the relaxed objective with respect to delta.

    d f / d delta_i = (rho / ln 2) * mean_l h_{l,i}^H (I + rho H_l Delta H_l^H)^-1 h_{l,i},
    where h_{l,i} is column i of H_l.
    """
    _check_rho(rho)
    values = _as_delta(tensor, delta)
    h = tensor.entries
    eye = np.eye(tensor.K)
    b = np.linalg.inv(eye + rho * gram(h, values))
    quad = np.real(np.einsum("lai,lab,lbi->li", h.conj(), b, h))
    return np.asarray(rho / LN2 * quad.mean(axis=0), dtype=np.float64)


def per_user_received_snr(
    tensor: ChannelTensor,
    mask: SelectionMask,
    rho: float,
    scheme: SnrScheme = SnrScheme.ZF,
) -> NDArray[np.float64]:
    """Per-user received SNR, shape (L, K).

    ZF gives every user rho*K / Tr{(H Delta H^H)^-1}. SingleUser gives rho * ||h||^2 over
    the active antennas, which is rho*N in expectation for unit-energy entries.

    Raises:
        PreconditionError: If ZF is requested with fewer antennas than users
        SingularChannelError: If a masked Gram matrix is ill-conditioned
    """
    _check_rho(rho)
    h = tensor.masked(mask)
    if SnrScheme(scheme) is SnrScheme.SINGLE_USER:
        return np.asarray(rho * np.sum(np.abs(h) ** 2, axis=2), dtype=np.float64)
    if mask.N < tensor.K:
        raise PreconditionError(f"ZF needs N >= K, got N={mask.N}, K={tensor.K}")
    trace = inverse_gram_diagonal(h).sum(axis=1)
    snr = rho * tensor.K / trace
    return np.repeat(snr[:, np.newaxis], tensor.K, axis=1)
