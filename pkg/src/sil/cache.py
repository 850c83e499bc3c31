"""Optional on-disk cache for FactorBlocks.

One file per (range, window).  Little-endian layout:

    header  "SILB" magic, u32 version, u64 n0, u64 n1, f64 P, f64 Q
    body    Omega as u8[L], lambda as i8[L], window_omega as u8[L],
            window_square_flag bit-packed (L bits, zero-padded to bytes)

Writes go through a temp file + os.replace so concurrent runs may share a
cache directory; readers only ever see complete files.  Corrupt or
mismatched files are treated as cache misses and rewritten.
"""
from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from .sieve import FactorBlock, SieveConfig, sieve_block

MAGIC = b"SILB"
VERSION = 1
_HEADER = struct.Struct("<4sIQQdd")


def write_block_file(path: str, block: FactorBlock) -> None:
    header = _HEADER.pack(MAGIC, VERSION, block.n0, block.n1, block.P, block.Q)
    packed = np.packbits(block.window_square_flag.astype(np.uint8))
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(block.big_omega.tobytes())
            fh.write(block.lam.tobytes())
            fh.write(block.window_omega.tobytes())
            fh.write(packed.tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_block_file(path: str) -> FactorBlock:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, n0, n1, P, Q = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    L = n1 - n0
    need = _HEADER.size + 3 * L + (L + 7) // 8
    if len(raw) != need:
        raise ValueError(f"{path}: expected {need} bytes, found {len(raw)}")
    off = _HEADER.size
    om = np.frombuffer(raw, dtype=np.uint8, count=L, offset=off).copy()
    off += L
    lam = np.frombuffer(raw, dtype=np.int8, count=L, offset=off).copy()
    off += L
    wom = np.frombuffer(raw, dtype=np.uint8, count=L, offset=off).copy()
    off += L
    packed = np.frombuffer(raw, dtype=np.uint8, count=(L + 7) // 8, offset=off)
    wsq = np.unpackbits(packed, count=L).astype(bool)
    return FactorBlock(n0, n1, P, Q, om, lam, wom, wsq)


def block_cache_path(cache_dir: str, n0: int, n1: int, P: float, Q: float) -> str:
    name = f"silb-{n0}-{n1}-{P:.17g}-{Q:.17g}.bin"
    return os.path.join(cache_dir, name)


def cached_sieve_block(rng: tuple[int, int], config: SieveConfig = SieveConfig(),
                       cache_dir: str | None = None) -> FactorBlock:
    """sieve_block with read-through caching when cache_dir is set."""
    if cache_dir is None:
        return sieve_block(rng, config)
    P, Q = (0.0, 0.0) if config.prime_window is None else (
        float(config.prime_window[0]), float(config.prime_window[1]))
    path = block_cache_path(cache_dir, int(rng[0]), int(rng[1]), P, Q)
    if os.path.exists(path):
        try:
            block = read_block_file(path)
            if (block.n0, block.n1, block.P, block.Q) == (int(rng[0]), int(rng[1]), P, Q):
                return block
        except (ValueError, OSError):
            pass  # fall through and resieve
    block = sieve_block(rng, config)
    write_block_file(path, block)
    return block
