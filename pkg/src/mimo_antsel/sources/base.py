"""Base channel source interface."""

from abc import ABC, abstractmethod

from tenacity import (
    retry,
    retry_if_exception_type,
    retry_if_not_exception_type,
    stop_after_attempt,
    wait_exponential,
)

from ..config import ScenarioConfig
from ..models import ChannelTensor


class BaseChannelSource(ABC):
    """Abstract base class for all channel sources."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Source name (e.g. 'iid_rayleigh', 'synthetic', 'file')."""
        pass

    @retry(
        stop=stop_after_attempt(3),
        wait=wait_exponential(multiplier=0.5, min=0.5, max=4),
        retry=retry_if_exception_type(OSError)
        & retry_if_not_exception_type((FileNotFoundError, IsADirectoryError, PermissionError)),
        reraise=True,
    )
    def load(self, config: ScenarioConfig) -> ChannelTensor:
        """Produce the un-normalized channel tensor for a scenario.

        Transient OS errors are retried; missing files and format errors are not.

        Args:
            config: Scenario providing dimensions and seed

        Returns:
            Channel tensor of shape (L, K, M)
        """
        return self._load(config)

    @abstractmethod
    def _load(self, config: ScenarioConfig) -> ChannelTensor:
        pass
