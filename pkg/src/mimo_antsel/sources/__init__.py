"""Channel sources: where a scenario's channel tensor comes from."""

from .base import BaseChannelSource
from .factory import ChannelSourceFactory
from .file import FileSource
from .iid import IidRayleighSource
from .synthetic import SyntheticSource

__all__ = [
    "BaseChannelSource",
    "ChannelSourceFactory",
    "FileSource",
    "IidRayleighSource",
    "SyntheticSource",
]
