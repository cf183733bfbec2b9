"""CTF1 file channel source."""

from pathlib import Path

import structlog

from ..config import ScenarioConfig
from ..ctf import load_channel
from ..exceptions import ConfigError
from ..models import ChannelTensor
from .base import BaseChannelSource

logger = structlog.get_logger(__name__)


class FileSource(BaseChannelSource):
    """Reads an externally supplied channel, e.g. a measured data set converted to CTF1."""

    def __init__(self, path: Path):
        self.path = path

    @property
    def name(self) -> str:
        return "file"

    def _load(self, config: ScenarioConfig) -> ChannelTensor:
        """Load the file and check it against the configured dimensions.

        Raises:
            ConfigError: If K, M or L in the file differ from the scenario
        """
        tensor = load_channel(self.path)
        for field in ("K", "M", "L"):
            expected, actual = getattr(config, field), getattr(tensor, field)
            if expected != actual:
                raise ConfigError(f"scenario has {expected}, {self.path} has {actual}", field)
        return tensor
