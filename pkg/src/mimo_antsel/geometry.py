"""Array geometries and the cluster-based synthetic channel generator.

The generator is a parametric surrogate for measured large-array channels. Each user sees
a set of scattering clusters. A cluster has an azimuth, a lognormal power and a region of
visibility along the array, and it is made of subpaths with random delays, which gives
frequency selectivity across subcarriers. Co-located users share their clusters, while
well-separated users each draw their own. An optional line-of-sight ray is added per user.
"""

from enum import StrEnum
from typing import Annotated, Any, Literal

import numpy as np
import structlog
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .channel import check_dims
from .exceptions import ConfigError, DimensionError
from .models import ChannelTensor

logger = structlog.get_logger(__name__)

HALF_WAVELENGTH = 0.5
RING_COUNT = 4
BACK_LOBE_FLOOR = 10 ** (-30 / 20)
TAPER_ROLL_OFF = 0.2
# Residual visibility outside a cluster's region, keeps every antenna weakly illuminated
TAPER_FLOOR = 10 ** (-40 / 20)
MAX_PLACEMENT_ATTEMPTS = 2000


class ArrayKind(StrEnum):
    LINEAR = "linear"
    CYLINDRICAL = "cylindrical"


class ArrayGeometry(BaseModel):
    """Element positions (in carrier wavelengths) and boresights of a base-station array."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: ArrayKind
    element_positions: np.ndarray = Field(..., description="Shape (M, 3), wavelengths")
    element_boresights: np.ndarray = Field(..., description="Shape (M,), azimuth radians")
    directivity_exponent: float = Field(default=0.0, ge=0.0)
    dual_polarized: bool = Field(default=False, description="Odd ports are the H polarization")

    @model_validator(mode="after")
    def check_counts(self) -> "ArrayGeometry":
        if self.element_positions.ndim != 2 or self.element_positions.shape[1] != 3:
            raise DimensionError("positions must have shape (M, 3)", "element_positions")
        if self.element_positions.shape[0] != self.element_boresights.shape[0]:
            raise DimensionError(
                "positions and boresights must have the same count", "element_boresights"
            )
        return self

    @property
    def M(self) -> int:  # noqa: N802
        return int(self.element_positions.shape[0])

    def amplitude_pattern(self, azimuth: NDArray[np.float64]) -> NDArray[np.float64]:
        """Element amplitude gain towards each azimuth, shape (M, len(azimuth)).

        Directive elements follow cos(psi)^q floored at the back-lobe level, where psi is
        the angle between boresight and arrival azimuth.
        """
        if self.directivity_exponent == 0:
            return np.ones((self.M, np.size(azimuth)))
        psi = np.asarray(azimuth)[np.newaxis, :] - self.element_boresights[:, np.newaxis]
        lobe = np.clip(np.cos(psi), 0.0, None) ** self.directivity_exponent
        return np.maximum(lobe, BACK_LOBE_FLOOR)


def linear_array(M: int) -> ArrayGeometry:  # noqa: N803
    """Uniform linear array of omnidirectional elements along x, half-wavelength spacing."""
    if M < 1:
        raise DimensionError(f"must be >= 1, got {M}", "M")
    positions = np.zeros((M, 3))
    positions[:, 0] = HALF_WAVELENGTH * np.arange(M)
    return ArrayGeometry(
        kind=ArrayKind.LINEAR,
        element_positions=positions,
        element_boresights=np.zeros(M),
        directivity_exponent=0.0,
    )


def cylindrical_array(
    M: int,  # noqa: N803
    directivity_exponent: float = 2.0,
    dual_polarized: bool = True,
) -> ArrayGeometry:
    """Four stacked rings of directive patches with boresights pointing radially outward.

    Ports are ordered from the bottom ring to the top ring and counter-clockwise within a
    ring, starting at azimuth 0. With dual polarization each patch carries two adjacent
    ports sharing a position and boresight.
    """
    if M < RING_COUNT or M % RING_COUNT:
        raise DimensionError(f"must be a positive multiple of {RING_COUNT}, got {M}", "M")
    per_ring = M // RING_COUNT
    if dual_polarized and per_ring % 2:
        raise DimensionError("dual polarization needs an even port count per ring", "M")

    ports_per_patch = 2 if dual_polarized else 1
    patches = per_ring // ports_per_patch
    # Patches about 0.6 wavelengths apart around the circumference
    radius = max(patches * 0.6 / (2 * np.pi), HALF_WAVELENGTH)

    patch_index = np.arange(per_ring) // ports_per_patch
    ring_azimuth = 2 * np.pi * patch_index / patches
    azimuths = np.tile(ring_azimuth, RING_COUNT)
    heights = np.repeat(0.6 * np.arange(RING_COUNT), per_ring)
    positions = np.column_stack(
        [radius * np.cos(azimuths), radius * np.sin(azimuths), heights]
    )
    return ArrayGeometry(
        kind=ArrayKind.CYLINDRICAL,
        element_positions=positions,
        element_boresights=azimuths,
        directivity_exponent=directivity_exponent,
        dual_polarized=dual_polarized,
    )


class CoLocated(BaseModel):
    """Users within one site, spacing_m apart."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["co_located"] = "co_located"
    spacing_m: float = Field(default=0.5, gt=0)


class WellSeparated(BaseModel):
    """Users spread over the area with a minimum pairwise distance."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["well_separated"] = "well_separated"
    min_spacing_m: float = Field(default=10.0, ge=0)


class Mixed(BaseModel):
    """Groups of co-located users at well-separated sites, alternating LOS and NLOS."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["mixed"] = "mixed"
    group_size: int = Field(default=4, ge=1)
    spacing_m: float = Field(default=0.5, gt=0)
    min_spacing_m: float = Field(default=10.0, ge=0)


UserLayout = Annotated[CoLocated | WellSeparated | Mixed, Field(discriminator="kind")]


class SyntheticSceneConfig(BaseModel):
    """Parameters of the synthetic propagation scene."""

    model_config = ConfigDict(extra="forbid")

    cluster_count: int = Field(default=8, ge=1)
    cluster_azimuth_spread_deg: float = Field(default=5.0, ge=0)
    cluster_elevation_spread_deg: float = Field(default=10.0, ge=0)
    visibility_region_fraction: float = Field(default=0.4, gt=0, le=1)
    cluster_power_sigma_db: float = Field(default=4.0, ge=0)
    los: bool = False
    ricean_k_db: float = 0.0
    user_layout: UserLayout = Field(default_factory=WellSeparated)
    subpaths_per_cluster: int = Field(default=20, ge=1)
    bandwidth_subcarriers: int = Field(default=161, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    area_side_m: float = Field(default=100.0, gt=0, description="Side of the user area")
    site_distance_m: float = Field(default=60.0, gt=0, description="Array-to-area distance")
    carrier_wavelength_m: float = Field(default=0.1153, gt=0, description="2.6 GHz")
    polarization_mean_db: float = Field(default=2.2, description="Mean V/H power ratio")
    polarization_sigma_db: float = Field(default=8.0, ge=0)
    cluster_azimuths_deg: list[float] | None = Field(
        default=None, description="Pinned cluster azimuths, one per cluster"
    )

    @field_validator("user_layout", mode="before")
    @classmethod
    def default_layout_kind(cls, v: Any) -> Any:
        if isinstance(v, str):
            return {"kind": v}
        return v

    @model_validator(mode="after")
    def check_pinned_azimuths(self) -> "SyntheticSceneConfig":
        if (
            self.cluster_azimuths_deg is not None
            and len(self.cluster_azimuths_deg) != self.cluster_count
        ):
            raise ValueError("cluster_azimuths_deg must have one entry per cluster")
        return self


class _Cluster(BaseModel):
    """Random draw of one cluster, shared by every user that sees it."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    power: float
    subpath_azimuths: np.ndarray
    subpath_elevations: np.ndarray
    subpath_delays: np.ndarray
    subpath_phases: np.ndarray
    subpath_user_angles: np.ndarray
    taper: np.ndarray


def visibility_taper(M: int, fraction: float, center: float) -> NDArray[np.float64]:  # noqa: N803
    """Raised-cosine amplitude window over antenna index.

    The window covers fraction * M antennas around center, flat in the middle with a
    cosine roll-off over the outer TAPER_ROLL_OFF of the width on each edge.
    """
    if fraction >= 1.0:
        return np.ones(M)
    width = fraction * M
    distance = np.abs(np.arange(M) - center)
    flat = (0.5 - TAPER_ROLL_OFF) * width
    edge = TAPER_ROLL_OFF * width
    taper = np.where(distance <= flat, 1.0, 0.0)
    rolling = (distance > flat) & (distance < flat + edge)
    taper[rolling] = 0.5 * (1 + np.cos(np.pi * (distance[rolling] - flat) / edge))
    return np.maximum(taper, TAPER_FLOOR)


def _draw_cluster(
    rng: np.random.Generator,
    scene: SyntheticSceneConfig,
    M: int,  # noqa: N803
    L: int,  # noqa: N803
    pinned_azimuth: float | None = None,
) -> _Cluster:
    S = scene.subpaths_per_cluster  # noqa: N806
    azimuth = rng.uniform(0.0, 2 * np.pi) if pinned_azimuth is None else pinned_azimuth
    spread = np.deg2rad(scene.cluster_azimuth_spread_deg)
    return _Cluster(
        power=float(10 ** (scene.cluster_power_sigma_db * rng.standard_normal() / 10)),
        subpath_azimuths=azimuth + spread * rng.standard_normal(S),
        subpath_elevations=np.deg2rad(scene.cluster_elevation_spread_deg)
        * rng.standard_normal(S),
        subpath_delays=rng.uniform(0.0, 16.0 / L, S),
        subpath_phases=rng.uniform(0.0, 2 * np.pi, S),
        subpath_user_angles=rng.uniform(0.0, 2 * np.pi, S),
        taper=visibility_taper(M, scene.visibility_region_fraction, rng.uniform(0, M - 1)),
    )


def _place_separated(
    rng: np.random.Generator, count: int, scene: SyntheticSceneConfig, min_spacing: float
) -> NDArray[np.float64]:
    """Uniform positions in the user area with pairwise distance >= min_spacing."""
    sites: list[NDArray[np.float64]] = []
    for _ in range(count):
        for _attempt in range(MAX_PLACEMENT_ATTEMPTS):
            candidate = np.array(
                [
                    rng.uniform(-0.5, 0.5) * scene.area_side_m,
                    scene.site_distance_m + rng.uniform(0, 1) * scene.area_side_m,
                ]
            )
            if all(np.hypot(*(candidate - s)) >= min_spacing for s in sites):
                sites.append(candidate)
                break
        else:
            raise ConfigError(
                f"cannot place {count} sites {min_spacing} m apart in a "
                f"{scene.area_side_m} m area",
                "user_layout",
            )
    return np.array(sites)


def place_users(
    rng: np.random.Generator, scene: SyntheticSceneConfig, K: int  # noqa: N803
) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
    """Place K users in the horizontal plane.

    Returns:
        Tuple of (positions in metres with shape (K, 2), site index per user)

    Raises:
        ConfigError: If the layout constraints cannot be met
    """
    layout = scene.user_layout
    if isinstance(layout, WellSeparated):
        return _place_separated(rng, K, scene, layout.min_spacing_m), np.arange(K)

    group = K if isinstance(layout, CoLocated) else layout.group_size
    site_count = -(-K // group)
    min_spacing = 0.0 if isinstance(layout, CoLocated) else layout.min_spacing_m
    sites = _place_separated(rng, site_count, scene, min_spacing)
    site_of = np.arange(K) // group
    offsets = layout.spacing_m * (np.arange(K) % group - (group - 1) / 2)
    positions = sites[site_of] + np.column_stack([offsets, np.zeros(K)])
    return positions, site_of


def _site_los(scene: SyntheticSceneConfig, site: int) -> bool:
    if isinstance(scene.user_layout, Mixed):
        return site % 2 == 0
    return scene.los


def _array_response(
    geometry: ArrayGeometry,
    azimuths: NDArray[np.float64],
    elevations: NDArray[np.float64] | None = None,
) -> NDArray[np.complex128]:
    """Plane-wave response (M, len(azimuths)) including the element pattern."""
    if elevations is None:
        elevations = np.zeros_like(azimuths)
    direction = np.stack(
        [
            np.cos(elevations) * np.cos(azimuths),
            np.cos(elevations) * np.sin(azimuths),
            np.sin(elevations),
        ]
    )
    phase = 2 * np.pi * geometry.element_positions @ direction
    return geometry.amplitude_pattern(azimuths) * np.exp(1j * phase)


def gen_synthetic(
    geometry: ArrayGeometry,
    scene: SyntheticSceneConfig,
    K: int,  # noqa: N803
) -> ChannelTensor:
    """Generate a cluster-based channel tensor of shape (L, K, M).

    Deterministic in scene.seed. Co-located users share one set of clusters and see it
    with per-user phases set by their position; users at different sites draw their
    own clusters.

    Raises:
        DimensionError: If the array has fewer than two elements
        ConfigError: If the users cannot be placed under the layout constraints
    """
    M = geometry.M  # noqa: N806
    L = scene.bandwidth_subcarriers  # noqa: N806
    check_dims(K, M, L)
    if M < 2:
        raise DimensionError(f"synthetic channels need at least 2 antennas, got {M}", "M")

    rng = np.random.default_rng(np.random.SeedSequence(scene.seed))
    positions, site_of = place_users(rng, scene, K)
    pinned_azimuths: list[float | None] = (
        [float(np.deg2rad(a)) for a in scene.cluster_azimuths_deg]
        if scene.cluster_azimuths_deg is not None
        else [None] * scene.cluster_count
    )
    site_clusters = [
        [_draw_cluster(rng, scene, M, L, pinned) for pinned in pinned_azimuths]
        for _ in range(int(site_of.max()) + 1)
    ]

    subcarriers = np.arange(L)
    wavelength = scene.carrier_wavelength_m
    ricean = 10 ** (scene.ricean_k_db / 10)
    entries = np.zeros((L, K, M), dtype=np.complex128)

    for k in range(K):
        site = int(site_of[k])
        clusters = site_clusters[site]
        total_power = sum(c.power for c in clusters)
        user_phase_offset = 2 * np.pi * positions[k, 0] / wavelength
        scattered = np.zeros((M, L), dtype=np.complex128)
        for c in clusters:
            S = c.subpath_azimuths.size  # noqa: N806
            phases = np.exp(
                1j * (c.subpath_phases + user_phase_offset * np.cos(c.subpath_user_angles))
            )
            weights = np.sqrt(c.power / total_power / S) * phases
            response = (
                _array_response(geometry, c.subpath_azimuths, c.subpath_elevations) * weights
            )
            delays = np.exp(-2j * np.pi * np.outer(c.subpath_delays, subcarriers))
            scattered += c.taper[:, np.newaxis] * (response @ delays)

        if _site_los(scene, site):
            los_azimuth = np.arctan2(positions[k, 1], positions[k, 0])
            distance_phase = np.exp(-2j * np.pi * np.hypot(*positions[k]) / wavelength)
            los = _array_response(geometry, np.array([los_azimuth]))[:, 0] * distance_phase
            scattered = np.sqrt(1 / (1 + ricean)) * scattered + np.sqrt(
                ricean / (1 + ricean)
            ) * los[:, np.newaxis]

        entries[:, k, :] = scattered.T

    if geometry.dual_polarized and scene.polarization_sigma_db + abs(
        scene.polarization_mean_db
    ) > 0:
        entries = _apply_polarization(rng, scene, entries)

    logger.debug("synthetic_channel_generated", K=K, M=M, L=L, seed=scene.seed)
    return ChannelTensor(
        entries=entries, meta=f"synthetic({geometry.kind.value}, seed={scene.seed})"
    )


def _apply_polarization(
    rng: np.random.Generator,
    scene: SyntheticSceneConfig,
    entries: NDArray[np.complex128],
) -> NDArray[np.complex128]:
    """Attenuate the H-polarized (odd) ports by a lognormal V/H power ratio per element.

    The ratio belongs to the port, so every user sees the same attenuation on it.
    """
    M = entries.shape[2]  # noqa: N806
    ratio_db = scene.polarization_mean_db + scene.polarization_sigma_db * rng.standard_normal(M)
    amplitude = np.ones(M)
    odd = np.arange(M) % 2 == 1
    amplitude[odd] = 10 ** (-ratio_db[odd] / 20)
    return entries * amplitude[np.newaxis, np.newaxis, :]
