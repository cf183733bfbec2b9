"""Cluster-based synthetic channel source."""

from ..config import ScenarioConfig, SyntheticSourceConfig
from ..geometry import SyntheticSceneConfig, gen_synthetic
from ..models import ChannelTensor
from .base import BaseChannelSource


class SyntheticSource(BaseChannelSource):
    """Builds the array from the scenario's M and the scene from its seed and L."""

    def __init__(self, source: SyntheticSourceConfig):
        self.source = source

    @property
    def name(self) -> str:
        return "synthetic"

    def scene_for(self, config: ScenarioConfig) -> SyntheticSceneConfig:
        return self.source.scene.model_copy(
            update={"seed": config.seed, "bandwidth_subcarriers": config.L}
        )

    def _load(self, config: ScenarioConfig) -> ChannelTensor:
        geometry = self.source.geometry.build(config.M)
        return gen_synthetic(geometry, self.scene_for(config), config.K)
