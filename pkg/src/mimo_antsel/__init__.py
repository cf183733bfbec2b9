"""massive-mimo-antsel - transmit antenna selection for multi-user massive MIMO-OFDM."""

__version__ = "0.1.0"

__all__ = ["__version__"]
