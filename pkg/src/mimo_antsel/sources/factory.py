"""Factory for creating channel sources."""

from ..config import (
    ChannelSourceConfig,
    FileSourceConfig,
    IidRayleighSourceConfig,
    SyntheticSourceConfig,
)
from .base import BaseChannelSource
from .file import FileSource
from .iid import IidRayleighSource
from .synthetic import SyntheticSource


class ChannelSourceFactory:
    """Factory for selecting and creating channel sources."""

    @classmethod
    def get_source(cls, source: ChannelSourceConfig) -> BaseChannelSource:
        """Get the channel source described by a scenario's channel_source block.

        Args:
            source: Parsed channel_source configuration

        Returns:
            Instantiated channel source

        Raises:
            ValueError: If the configuration type is unknown
        """
        match source:
            case IidRayleighSourceConfig():
                return IidRayleighSource()
            case SyntheticSourceConfig():
                return SyntheticSource(source)
            case FileSourceConfig():
                return FileSource(source.path)
        raise ValueError(f"No channel source for: {source!r}")
