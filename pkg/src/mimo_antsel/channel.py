"""Channel tensor generation, normalization and statistics."""

import numpy as np
import structlog
from numpy.typing import NDArray

from .exceptions import DegenerateInputError, DimensionError
from .models import ChannelTensor, Normalization

logger = structlog.get_logger(__name__)


def check_dims(K: int, M: int, L: int) -> None:  # noqa: N803
    """Raise DimensionError unless every dimension is at least one."""
    for name, value in (("K", K), ("M", M), ("L", L)):
        if int(value) < 1:
            raise DimensionError(f"must be >= 1, got {value}", name)


def complex_gaussian(rng: np.random.Generator, shape: tuple[int, ...]) -> NDArray[np.complex128]:
    """Circularly-symmetric complex Gaussian samples with unit variance."""
    parts = rng.standard_normal((2, *shape))
    return (parts[0] + 1j * parts[1]) / np.sqrt(2.0)


def gen_iid_rayleigh(K: int, M: int, L: int, seed: int) -> ChannelTensor:  # noqa: N803
    """Generate an i.i.d. Rayleigh channel tensor.

    Entries are CN(0, 1), so the tensor is normalized in expectation.

    Raises:
        DimensionError: If any dimension is zero
    """
    check_dims(K, M, L)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    entries = complex_gaussian(rng, (L, K, M))
    return ChannelTensor(entries=entries, meta=f"iid_rayleigh(seed={seed})")


def per_antenna_avg_power(tensor: ChannelTensor) -> NDArray[np.float64]:
    """Average received power per base-station antenna.

    Element m is the mean of |g_{k,m}(l)|^2 over all K users and L subcarriers.
    """
    power = np.abs(tensor.entries) ** 2
    return np.asarray(power.mean(axis=(0, 1)), dtype=np.float64)


def power_spread_db(tensor: ChannelTensor) -> float:
    """Ratio of strongest to weakest per-antenna average power, in dB."""
    power = per_antenna_avg_power(tensor)
    weakest = float(power.min())
    if weakest <= 0:
        return float("inf")
    return float(10.0 * np.log10(power.max() / weakest))


def normalize(tensor: ChannelTensor, mode: Normalization = Normalization.JOINT) -> ChannelTensor:
    """Scale a channel tensor to unit average energy.

    Joint scales all entries by one scalar so the mean |entry|^2 is 1. PerUser scales
    each user's entries by a separate scalar so every user's mean |entry|^2 is 1,
    removing pathloss differences between users. Neither mode touches the variation
    over antennas within a user.

    Raises:
        DegenerateInputError: If the tensor (Joint) or any user (PerUser) is all-zero
    """
    power = np.abs(tensor.entries) ** 2
    mode = Normalization(mode)

    if mode is Normalization.JOINT:
        mean_power = float(power.mean())
        if mean_power <= 0:
            raise DegenerateInputError("cannot normalize an all-zero channel")
        entries = tensor.entries / np.sqrt(mean_power)
    else:
        user_power = power.mean(axis=(0, 2))
        zero_users = np.flatnonzero(user_power <= 0)
        if zero_users.size:
            raise DegenerateInputError(
                f"cannot normalize per user: user(s) {zero_users.tolist()} have no energy"
            )
        entries = tensor.entries / np.sqrt(user_power)[np.newaxis, :, np.newaxis]

    logger.debug("channel_normalized", mode=mode.value, meta=tensor.meta)
    return ChannelTensor(entries=entries, meta=tensor.meta)
