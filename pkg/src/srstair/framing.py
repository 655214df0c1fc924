"""Binary chain files.

Layout (little-endian)::

    16 bytes  magic b"SRSTAIRCASECHAIN"
    u32       format version
    32 bytes  SHA-256 of the canonical code configuration
    u32       number of blocks L
    u64       payload length in information bits
    ...       blocks B_1 .. B_L, each row-major and bit-packed LSB-first,
              padded to a whole byte per block
"""

from __future__ import annotations

import hashlib
import json
import math
import struct
from typing import Sequence

import numpy as np

from .srsc import SrscConfig, block_shape

MAGIC = b"SRSTAIRCASECHAIN"
VERSION = 1
_HEADER = struct.Struct("<16sI32sIQ")


class ChainFileError(ValueError):
    pass


def config_hash(cfg: SrscConfig) -> bytes:
    params = {k: v for k, v in cfg.as_dict().items() if k != "L"}
    return hashlib.sha256(json.dumps(params, sort_keys=True).encode()).digest()


def dumps_chain(cfg: SrscConfig, blocks: Sequence[np.ndarray], payload_bits: int) -> bytes:
    parts = [_HEADER.pack(MAGIC, VERSION, config_hash(cfg), len(blocks), payload_bits)]
    for i, blk in enumerate(blocks, start=1):
        if blk.shape != block_shape(cfg, i):
            raise ChainFileError(f"block {i} has shape {blk.shape}, expected {block_shape(cfg, i)}")
        parts.append(np.packbits(np.asarray(blk, dtype=np.uint8).ravel(), bitorder="little").tobytes())
    return b"".join(parts)


def loads_chain(cfg: SrscConfig, data: bytes) -> tuple[list[np.ndarray], int]:
    if len(data) < _HEADER.size:
        raise ChainFileError("file too short for a chain header")
    magic, version, digest, L, payload = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ChainFileError("bad magic: not a chain file")
    if version != VERSION:
        raise ChainFileError(f"unsupported chain file version {version}")
    if digest != config_hash(cfg):
        raise ChainFileError("chain file was written for a different code configuration")
    blocks, pos = [], _HEADER.size
    for i in range(1, L + 1):
        r, c = block_shape(cfg, i)
        nbytes = math.ceil(r * c / 8)
        if pos + nbytes > len(data):
            raise ChainFileError(f"truncated chain file at block {i}")
        chunk = np.frombuffer(data, dtype=np.uint8, count=nbytes, offset=pos)
        pos += nbytes
        blocks.append(np.unpackbits(chunk, bitorder="little")[: r * c].reshape(r, c))
    if pos != len(data):
        raise ChainFileError(f"{len(data) - pos} trailing bytes after block {L}")
    return blocks, payload
