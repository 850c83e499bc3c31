import os

import numpy as np
import pytest

from sil import (SieveConfig, cached_sieve_block, read_block_file,
                 sieve_block, write_block_file)
from sil.cache import block_cache_path


def blocks_equal(a, b):
    return ((a.n0, a.n1, a.P, a.Q) == (b.n0, b.n1, b.P, b.Q)
            and np.array_equal(a.big_omega, b.big_omega)
            and np.array_equal(a.lam, b.lam)
            and np.array_equal(a.window_omega, b.window_omega)
            and np.array_equal(a.window_square_flag, b.window_square_flag))


def test_file_roundtrip(tmp_path):
    blk = sieve_block((1000, 3000), SieveConfig(prime_window=(3.0, 37.0)))
    path = str(tmp_path / "blk.bin")
    write_block_file(path, blk)
    assert blocks_equal(read_block_file(path), blk)


def test_cached_sieve_block_hits_disk(tmp_path):
    cfg = SieveConfig(prime_window=(5.0, 50.0))
    cache = str(tmp_path)
    first = cached_sieve_block((500, 800), cfg, cache_dir=cache)
    path = block_cache_path(cache, 500, 800, 5.0, 50.0)
    assert os.path.exists(path)
    mtime = os.path.getmtime(path)
    again = cached_sieve_block((500, 800), cfg, cache_dir=cache)
    assert blocks_equal(first, again)
    assert os.path.getmtime(path) == mtime  # second call read, not rewrote


def test_corrupt_file_is_a_miss(tmp_path):
    cfg = SieveConfig()
    cache = str(tmp_path)
    cached_sieve_block((10, 40), cfg, cache_dir=cache)
    path = block_cache_path(cache, 10, 40, 0.0, 0.0)
    with open(path, "wb") as fh:
        fh.write(b"XXXX garbage")
    blk = cached_sieve_block((10, 40), cfg, cache_dir=cache)
    assert blocks_equal(blk, sieve_block((10, 40), cfg))
    assert blocks_equal(read_block_file(path), blk)  # rewritten clean


def test_read_rejects_bad_bytes(tmp_path):
    path = str(tmp_path / "bad.bin")
    with open(path, "wb") as fh:
        fh.write(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ValueError):
        read_block_file(path)
