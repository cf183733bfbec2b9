"""Data models shared by the channel, rate, selection and experiment layers."""

from enum import StrEnum
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import DimensionError

ComplexArray = NDArray[np.complex128]
FloatArray = NDArray[np.float64]
BoolArray = NDArray[np.bool_]


class Scheme(StrEnum):
    """Precoding scheme a rate refers to."""

    DPC = "DPC"
    ZF = "ZF"


class AllocationKind(StrEnum):
    DPC_POWER = "DpcPower"
    ZF_SNR = "ZfSnr"


class Strategy(StrEnum):
    """Antenna selection strategy."""

    CONVEX = "Convex"
    POWER = "Power"
    RANDOM = "Random"
    EXHAUSTIVE = "Exhaustive"


class Normalization(StrEnum):
    JOINT = "Joint"
    PER_USER = "PerUser"


class ChannelTensor(BaseModel):
    """Complex channel coefficients for K users, M antennas and L subcarriers.

    Entries are stored with shape (L, K, M): subcarrier-major, then user, with the
    antenna index innermost. The array is made read-only on construction.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray = Field(..., description="Channel coefficients, shape (L, K, M)")
    meta: str = Field(default="", description="Provenance tag (generator + seed, or filename)")

    @field_validator("entries", mode="before")
    @classmethod
    def validate_entries(cls, v: Any) -> ComplexArray:
        """Ensure a finite 3-D complex array with nonzero dimensions."""
        arr = np.array(v, dtype=np.complex128, copy=True)
        if arr.ndim != 3:
            raise DimensionError(f"expected a 3-D (L, K, M) array, got {arr.ndim}-D", "entries")
        if 0 in arr.shape:
            raise DimensionError(f"all dimensions must be >= 1, got {arr.shape}", "entries")
        if not np.all(np.isfinite(arr)):
            raise DimensionError("channel entries must be finite", "entries")
        arr.setflags(write=False)
        return arr

    @property
    def L(self) -> int:  # noqa: N802
        return int(self.entries.shape[0])

    @property
    def K(self) -> int:  # noqa: N802
        return int(self.entries.shape[1])

    @property
    def M(self) -> int:  # noqa: N802
        return int(self.entries.shape[2])

    def masked(self, mask: "SelectionMask") -> ComplexArray:
        """Return the (L, K, N) sub-tensor of active antennas."""
        if mask.M != self.M:
            raise DimensionError(f"mask has {mask.M} antennas, channel has {self.M}", "mask")
        return self.entries[:, :, mask.active]

    def equals(self, other: "ChannelTensor") -> bool:
        """Bit-exact comparison of two tensors."""
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )


class SelectionMask(BaseModel):
    """Diagonal binary selection of active antennas / RF chains."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    active: np.ndarray = Field(..., description="True for each active antenna, length M")

    @field_validator("active", mode="before")
    @classmethod
    def validate_active(cls, v: Any) -> BoolArray:
        arr = np.array(v, dtype=bool, copy=True).reshape(-1)
        if arr.size == 0:
            raise DimensionError("mask must cover at least one antenna", "active")
        arr.setflags(write=False)
        return arr

    @classmethod
    def from_indices(cls, indices: Any, M: int) -> "SelectionMask":  # noqa: N803
        """Build a mask from 0-based antenna indices."""
        active = np.zeros(M, dtype=bool)
        active[np.asarray(indices, dtype=int)] = True
        return cls(active=active)

    @classmethod
    def full(cls, M: int) -> "SelectionMask":  # noqa: N803
        return cls(active=np.ones(M, dtype=bool))

    @property
    def M(self) -> int:  # noqa: N802
        return int(self.active.size)

    @property
    def N(self) -> int:  # noqa: N802
        return int(np.count_nonzero(self.active))

    @property
    def indices(self) -> list[int]:
        """Sorted 0-based indices of active antennas."""
        return [int(i) for i in np.flatnonzero(self.active)]

    def as_delta(self) -> FloatArray:
        return self.active.astype(np.float64)


class PowerAllocation(BaseModel):
    """Per-subcarrier, per-user power (DPC) or received SNR (ZF) allocation."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: AllocationKind
    values: np.ndarray = Field(..., description="Allocation, shape (L, K)")
    rho: float = Field(..., description="Normalized transmit SNR per user (linear)")
    K: int = Field(..., ge=1)  # noqa: N815


class RateResult(BaseModel):
    """Per-subcarrier and subcarrier-averaged rate in bps/Hz."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    scheme: Scheme
    per_subcarrier: np.ndarray
    allocation: PowerAllocation
    iterations: int = Field(default=0, description="Solver iterations (DPC only)")
    converged: bool = Field(default=True)

    @property
    def mean(self) -> float:
        return float(np.mean(self.per_subcarrier))


class RelaxedDelta(BaseModel):
    """Solution of the relaxed selection problem, values in [0, 1] summing to N."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    target_N: int = Field(..., ge=1)  # noqa: N815
    objective: float = Field(..., description="Relaxed mean log-det value, bps/Hz")


class SolverStats(BaseModel):
    """Bookkeeping from a selection run."""

    iterations: int = 0
    grad_norm: float = 0.0
    wall_ms: float = 0.0
    converged: bool = True


class SelectionReport(BaseModel):
    """A selection together with the rates it achieves."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mask: SelectionMask
    strategy: Strategy
    dpc: RateResult
    zf: RateResult | None = None
    objective: float = Field(..., description="Equal-power mean log-det of the mask")
    solver_stats: SolverStats = Field(default_factory=SolverStats)

    @model_validator(mode="after")
    def check_dimensions(self) -> "SelectionReport":
        if self.zf is not None and self.zf.per_subcarrier.shape != self.dpc.per_subcarrier.shape:
            raise DimensionError("DPC and ZF results cover different subcarriers", "zf")
        return self


class RandomBaseline(BaseModel):
    """Mean rates over independent random masks, with standard errors."""

    dpc_mean: float
    dpc_stderr: float
    zf_mean: float | None = None
    zf_stderr: float | None = None
    objective_mean: float
    objective_stderr: float
    draws: int = Field(..., ge=1)


class SweepRow(BaseModel):
    """One (strategy, N) cell of a sweep."""

    scenario: str
    strategy: Strategy
    N: int  # noqa: N815
    dpc_mean: float
    zf_mean: float | None
    dpc_gain_pct: float
    zf_gain_pct: float | None
    objective: float
    iters: int = 0
    wall_ms: float = 0.0
    indices: list[int] = Field(default_factory=list, description="0-based active antennas")


class PowerLoss(BaseModel):
    """Loss of power-based selection relative to convex selection at one N."""

    N: int  # noqa: N815
    dpc_loss_pct: float
    zf_loss_pct: float | None


class SweepResult(BaseModel):
    """All rows of a scenario sweep plus derived metrics."""

    scenario: str
    K: int  # noqa: N815
    M: int  # noqa: N815
    rows: list[SweepRow] = Field(default_factory=list)
    baselines: dict[int, RandomBaseline] = Field(default_factory=dict)
    n90_dpc: dict[Strategy, int] = Field(default_factory=dict)
    n90_zf: dict[Strategy, int] = Field(default_factory=dict)
    report_points: dict[Strategy, dict[int, tuple[float, float | None]]] = Field(
        default_factory=dict, description="Gain (DPC, ZF) vs random at configured N values"
    )
    power_loss: list[PowerLoss] = Field(default_factory=list)
    sanity_violations: list[str] = Field(default_factory=list)

    def rows_for(self, strategy: Strategy) -> list[SweepRow]:
        return sorted((r for r in self.rows if r.strategy == strategy), key=lambda r: r.N)
