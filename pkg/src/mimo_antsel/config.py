"""Configuration management using pydantic-settings and JSON scenario files."""

import math
from functools import lru_cache
from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import ConfigError
from .geometry import (
    ArrayGeometry,
    ArrayKind,
    SyntheticSceneConfig,
    cylindrical_array,
    linear_array,
)
from .models import Normalization, Strategy


def find_env_file() -> Path | None:
    """Find .env file in current or parent directories."""
    current = Path.cwd()
    root = Path("/")

    while current != root:
        env_path = current / ".env"
        if env_path.exists():
            return env_path
        current = current.parent

    # Check home directory as fallback
    home_env = Path.home() / ".antsel" / ".env"
    if home_env.exists():
        return home_env

    return None


class Settings(BaseSettings):
    """Application settings loaded from ANTSEL_* environment variables and .env file."""

    model_config = SettingsConfigDict(
        env_prefix="ANTSEL_",
        env_file=find_env_file() or ".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    log_dir: Path = Field(
        default=Path.home() / ".antsel" / "logs", description="Directory for antsel.log"
    )

    # Solver Configuration
    dpc_max_iters: int = Field(default=500, ge=1, description="Iterative waterfilling cap")
    dpc_tol: float = Field(default=1e-8, gt=0, description="DPC capacity increment tolerance")
    convex_max_iters: int = Field(default=2000, ge=1, description="Projected-gradient cap")
    convex_grad_tol: float = Field(default=1e-6, gt=0, description="Projected-gradient norm")
    exhaustive_limit: float = Field(default=1e6, gt=0, description="Max subsets to enumerate")

    # Experiment Configuration
    random_draws: int = Field(default=200, ge=1, description="Random masks per baseline")
    threads: int = Field(default=1, ge=1, description="Worker threads for sweep cells")
    record_timings: bool = Field(
        default=False, description="Write wall-clock times to CSV (breaks byte-identity)"
    )


@lru_cache
def get_settings() -> Settings:
    """Get application settings (cached singleton).

    Raises:
        ConfigError: If an ANTSEL_* variable is invalid
    """
    try:
        return Settings()
    except ValidationError as e:
        raise _config_error(e, prefix="ANTSEL_") from e


class GeometryConfig(BaseModel):
    """Array geometry of a synthetic channel source; M comes from the scenario."""

    model_config = ConfigDict(extra="forbid")

    kind: ArrayKind = ArrayKind.LINEAR
    directivity_exponent: float = Field(default=2.0, ge=0)
    dual_polarized: bool = Field(default=True, description="Cylindrical only")

    def build(self, M: int) -> ArrayGeometry:  # noqa: N803
        if self.kind is ArrayKind.CYLINDRICAL:
            return cylindrical_array(M, self.directivity_exponent, self.dual_polarized)
        return linear_array(M)


class IidRayleighSourceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["iid_rayleigh"] = "iid_rayleigh"


class SyntheticSourceConfig(BaseModel):
    """Cluster-based synthetic channel; the scenario's seed and L override the scene's."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["synthetic"] = "synthetic"
    geometry: GeometryConfig = Field(default_factory=GeometryConfig)
    scene: SyntheticSceneConfig = Field(default_factory=SyntheticSceneConfig)


class FileSourceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["file"] = "file"
    path: Path


ChannelSourceConfig = Annotated[
    IidRayleighSourceConfig | SyntheticSourceConfig | FileSourceConfig,
    Field(discriminator="kind"),
]


class ScenarioConfig(BaseModel):
    """One experiment: a channel source, dimensions, SNR and an N sweep."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1)
    channel_source: ChannelSourceConfig
    K: int = Field(..., ge=1, description="Users")  # noqa: N815
    M: int = Field(..., ge=1, description="Base-station antennas")  # noqa: N815
    L: int = Field(..., ge=1, description="Subcarriers")  # noqa: N815
    rho_db: float = Field(default=-5.0, description="Transmit SNR per user in dB")
    n_sweep: list[int] | None = Field(default=None, description="N values to sweep")
    strategies: list[Strategy] = Field(
        default_factory=lambda: [Strategy.CONVEX, Strategy.POWER, Strategy.RANDOM]
    )
    random_draws: int | None = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    normalization: Normalization = Normalization.JOINT
    report_points: list[int] = Field(default_factory=list)

    @field_validator("rho_db")
    @classmethod
    def validate_rho_db(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("rho_db must be finite")
        return v

    @field_validator("strategies")
    @classmethod
    def validate_strategies(cls, v: list[Strategy]) -> list[Strategy]:
        """Drop duplicates, keep order, refuse an empty list."""
        if not v:
            raise ValueError("at least one strategy is required")
        return list(dict.fromkeys(v))

    @model_validator(mode="after")
    def validate_n_values(self) -> "ScenarioConfig":
        if self.K > self.M:
            raise ValueError(f"K: {self.K} exceeds M={self.M}")
        for field in ("n_sweep", "report_points"):
            values = getattr(self, field) or []
            bad = [n for n in values if not self.K <= n <= self.M]
            if bad:
                raise ValueError(f"{field}: values {bad} outside [K={self.K}, M={self.M}]")
        return self

    @property
    def rho(self) -> float:
        """Linear transmit SNR per user."""
        return float(10 ** (self.rho_db / 10))


def _config_error(error: ValidationError, prefix: str = "") -> ConfigError:
    """Turn the first pydantic error into a ConfigError naming its field."""
    first = error.errors()[0]
    field = ".".join(str(part) for part in first["loc"]) or None
    message = first["msg"]
    if field is None and ":" in message:
        # Model-level validators name the field in the message
        head, _, rest = message.partition(":")
        candidate = head.removeprefix("Value error, ")
        if candidate.isidentifier():
            field, message = candidate, rest.strip()
    if field and prefix:
        field = f"{prefix}{field.upper()}"
    return ConfigError(message, field)


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse a JSON scenario document.

    Raises:
        ConfigError: If the JSON is malformed, a key is unknown or a value is invalid
    """
    try:
        return ScenarioConfig.model_validate_json(text)
    except ValidationError as e:
        raise _config_error(e) from e


def load_scenario(path: Path) -> ScenarioConfig:
    """Read and validate a scenario file.

    Raises:
        ConfigError: If the file cannot be read or does not validate
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}", "config") from e
    return parse_scenario(text)
