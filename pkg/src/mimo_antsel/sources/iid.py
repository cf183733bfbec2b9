"""I.i.d. Rayleigh channel source."""

from ..channel import gen_iid_rayleigh
from ..config import ScenarioConfig
from ..models import ChannelTensor
from .base import BaseChannelSource


class IidRayleighSource(BaseChannelSource):
    @property
    def name(self) -> str:
        return "iid_rayleigh"

    def _load(self, config: ScenarioConfig) -> ChannelTensor:
        return gen_iid_rayleigh(config.K, config.M, config.L, config.seed)
