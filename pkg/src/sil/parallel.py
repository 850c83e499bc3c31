"""Deterministic work distribution.

Parallelism never changes numbers here: work is cut into fixed chunks that do
not depend on the thread count, each chunk is computed independently, and
partial results are combined in chunk order. ordered_map(threads=1) and
ordered_map(threads=N) therefore produce identical floats.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: int | None) -> int:
    """Explicit value wins, then SIL_THREADS, then 1."""
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("SIL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return 1


def ordered_map(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """map(fn, items) with results in input order regardless of thread count."""
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def fixed_chunks(n: int, size: int) -> list[tuple[int, int]]:
    """Half-open index ranges [i, j) covering range(n); independent of threads."""
    return [(i, min(i + size, n)) for i in range(0, n, size)]
