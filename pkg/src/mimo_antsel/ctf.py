"""CTF1 binary channel files.

Layout: b"CTF1", then u32 version, K, M, L (little-endian), then L*K*M complex entries in
(subcarrier, user, antenna) order with the antenna index innermost, each stored as two
little-endian float64 (real, imaginary). No padding.
"""

import struct
from pathlib import Path

import numpy as np
import structlog

from .exceptions import ChannelDimensionError, ChannelFormatError, OutputError
from .models import ChannelTensor

logger = structlog.get_logger(__name__)

MAGIC = b"CTF1"
VERSION = 1
HEADER = struct.Struct("<4I")
HEADER_SIZE = len(MAGIC) + HEADER.size
ENTRY_DTYPE = np.dtype("<c16")
ENTRY_SIZE = ENTRY_DTYPE.itemsize


def encode_channel(tensor: ChannelTensor) -> bytes:
    header = MAGIC + HEADER.pack(VERSION, tensor.K, tensor.M, tensor.L)
    payload = np.ascontiguousarray(tensor.entries, dtype=ENTRY_DTYPE).tobytes()
    return header + payload


def decode_channel(data: bytes, meta: str = "") -> ChannelTensor:
    """Parse CTF1 bytes into a ChannelTensor.

    Raises:
        ChannelFormatError: On a bad magic or version, a size mismatch or a non-finite
            entry, with the byte offset of the problem
        ChannelDimensionError: If a header dimension is zero
    """
    if data[: len(MAGIC)] != MAGIC:
        raise ChannelFormatError(f"bad magic {data[:len(MAGIC)]!r}, expected {MAGIC!r}", 0)
    if len(data) < HEADER_SIZE:
        raise ChannelFormatError(
            f"truncated header: {len(data)} of {HEADER_SIZE} bytes", len(data)
        )

    version, K, M, L = HEADER.unpack_from(data, len(MAGIC))  # noqa: N806
    if version != VERSION:
        raise ChannelFormatError(f"unsupported version {version}", len(MAGIC))
    for index, (name, value) in enumerate((("K", K), ("M", M), ("L", L)), start=1):
        if value == 0:
            raise ChannelDimensionError(name, len(MAGIC) + 4 * index)

    count = K * M * L
    expected = HEADER_SIZE + ENTRY_SIZE * count
    if len(data) < expected:
        raise ChannelFormatError(
            f"truncated payload: expected {expected} bytes for K={K}, M={M}, L={L}, "
            f"got {len(data)}",
            len(data),
        )
    if len(data) > expected:
        raise ChannelFormatError(f"{len(data) - expected} trailing bytes", expected)

    entries = np.frombuffer(data, dtype=ENTRY_DTYPE, count=count, offset=HEADER_SIZE)
    bad = np.flatnonzero(~np.isfinite(entries))
    if bad.size:
        first = int(bad[0])
        offset = HEADER_SIZE + ENTRY_SIZE * first
        if np.isfinite(entries[first].real):
            offset += ENTRY_SIZE // 2
        raise ChannelFormatError(f"non-finite entry {first}", offset)

    return ChannelTensor(entries=entries.reshape(L, K, M).astype(np.complex128), meta=meta)


def save_channel(tensor: ChannelTensor, path: Path) -> None:
    """Write a tensor as CTF1, exactly 20 + 16*K*M*L bytes.

    Raises:
        OutputError: If the file cannot be written
    """
    try:
        path.write_bytes(encode_channel(tensor))
    except OSError as e:
        raise OutputError(path, e) from e
    logger.info("channel_saved", path=str(path), K=tensor.K, M=tensor.M, L=tensor.L)


def load_channel(path: Path) -> ChannelTensor:
    """Read a CTF1 file. The file name becomes the tensor's meta tag.

    Raises:
        OSError: If the file cannot be read
        ChannelFormatError: If the contents are not valid CTF1
        ChannelDimensionError: If a header dimension is zero
    """
    tensor = decode_channel(path.read_bytes(), meta=path.name)
    logger.info("channel_loaded", path=str(path), K=tensor.K, M=tensor.M, L=tensor.L)
    return tensor
