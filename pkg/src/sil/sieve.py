"""Segmented sieve producing complete multiplicative data for integer blocks.

For every n in a half-open range [n0, n1) a FactorBlock stores

    big_omega[n - n0]           Omega(n), prime factors with multiplicity
    lam[n - n0]                 lambda(n) = (-1)^Omega(n)
    window_omega[n - n0]        #{p in [P, Q] : p | n}, distinct primes
    window_square_flag[n - n0]  True iff p^2 | n for some prime p in [P, Q]

No factorization is ever stored.  Omega is accumulated by iterating prime
powers (one +1 per power q = p, p^2, ... dividing n) while a remainder array
is divided down; after all base primes p <= sqrt(n1 - 1) have been applied,
any remainder > 1 is the single prime factor above the square root.

Ranges shorter than _SMALL_RANGE are factored integer-by-integer instead:
the strided passes pay a per-prime overhead that dwarfs the work for tiny
blocks (a length-one block at n ~ 1e10 would otherwise touch ~1e4 slices).
Both paths compute identical integers and are property-tested against each
other.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import CapacityError, ValidationError

DEFAULT_BLOCK_SIZE = 1 << 22
_SMALL_RANGE = 1024
# Base primes are materialized up to this bound, so ranges may extend to
# roughly its square (~1e16).  Beyond that the prime table itself would not
# fit in memory and the request is refused.
_MAX_BASE_PRIME = 100_000_000
_MAX_BLOCK_LEN = 1 << 28

_base_lock = threading.Lock()
_base_limit = 0
_base_arr = np.empty(0, dtype=np.int64)


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit, ascending, as int64."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _base_primes(limit: int) -> np.ndarray:
    """Cached ascending primes <= limit (grown monotonically, thread-safe)."""
    global _base_limit, _base_arr
    if limit > _MAX_BASE_PRIME:
        raise CapacityError(
            f"factor base up to {limit} exceeds the supported bound "
            f"{_MAX_BASE_PRIME}; integers must stay below about "
            f"{_MAX_BASE_PRIME}**2"
        )
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    with _base_lock:
        if limit > _base_limit:
            target = max(limit, 2 * _base_limit, 1 << 16)
            _base_arr = primes_up_to(target)
            _base_limit = target
        arr = _base_arr
    hi = int(np.searchsorted(arr, limit, side="right"))
    return arr[:hi]


@dataclass(frozen=True)
class SieveConfig:
    """block_size: integers per internal segment; prime_window: closed real
    interval [P, Q] whose primes feed window_omega/window_square_flag, or
    None for no window (both fields then stay zero)."""

    block_size: int = DEFAULT_BLOCK_SIZE
    prime_window: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.block_size < 1:
            raise ValidationError("block_size must be >= 1")
        if self.prime_window is not None:
            P, Q = self.prime_window
            if not (2 <= P <= Q):
                raise ValidationError("prime window requires 2 <= P <= Q")


@dataclass(frozen=True)
class FactorBlock:
    """Immutable multiplicative data for [n0, n1); safe to share across threads."""

    n0: int
    n1: int
    P: float  # 0.0 when the block was built without a window
    Q: float
    big_omega: np.ndarray  # uint8
    lam: np.ndarray  # int8, lambda(n) = (-1)**Omega(n)
    window_omega: np.ndarray  # uint8
    window_square_flag: np.ndarray  # bool

    def __len__(self) -> int:
        return self.n1 - self.n0


def _window_bounds(config: SieveConfig) -> tuple[float, float]:
    if config.prime_window is None:
        return (0.0, -1.0)  # empty: no integer satisfies lo <= p <= hi
    return (float(config.prime_window[0]), float(config.prime_window[1]))


def _sieve_segment(a: int, b: int, wlo: float, whi: float,
                   om: np.ndarray, wom: np.ndarray, wsq: np.ndarray) -> None:
    """Fill Omega / window counts for [a, b) into the provided array views."""
    L = b - a
    top = b - 1
    rem = np.arange(a, b, dtype=np.int64)
    for p in _base_primes(math.isqrt(top)).tolist():
        q = p
        while q <= top:
            start = (-(a // -q)) * q - a  # first multiple of q in [a, b)
            if start < L:
                sl = slice(start, L, q)
                om[sl] += 1
                rem[sl] //= p
            q *= p
        if wlo <= p <= whi:
            start = (-(a // -p)) * p - a
            if start < L:
                wom[start::p] += 1
            p2 = p * p
            if p2 <= top:
                start = (-(a // -p2)) * p2 - a
                if start < L:
                    wsq[start::p2] = True
    # whatever remains is a single prime factor > sqrt(top)
    big = rem > 1
    om[big] += 1
    if whi >= wlo:
        inwin = big & (rem >= wlo) & (rem <= whi)
        wom[inwin] += 1


def _factor_one(n: int, base: np.ndarray, wlo: float, whi: float) -> tuple[int, int, bool]:
    """(Omega, window_omega, window_square_flag) by direct factorization."""
    if n <= 1:
        return 0, 0, False
    om = 0
    wm = 0
    sq = False
    hi = int(np.searchsorted(base, math.isqrt(n), side="right"))
    cand = base[:hi]
    hits = cand[n % cand == 0]
    m = n
    for p in hits.tolist():
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        om += k
        if wlo <= p <= whi:
            wm += 1
            sq = sq or k >= 2
    if m > 1:
        om += 1
        if wlo <= m <= whi:
            wm += 1
    return om, wm, sq


def sieve_block(rng: tuple[int, int], config: SieveConfig = SieveConfig()) -> FactorBlock:
    """Sieve the half-open range [n0, n1) under config.

    The range must satisfy 1 <= n0 <= n1 < 2**63 (n = 1 is the empty product:
    Omega = 0, lambda = +1).  Empty ranges yield an empty block.  Lengths
    beyond _MAX_BLOCK_LEN are refused; iterate with iter_blocks instead.
    """
    n0, n1 = int(rng[0]), int(rng[1])
    if n1 < n0:
        raise ValidationError(f"range [{n0}, {n1}) is reversed")
    if n0 < 1 or n1 > 2**63:
        raise ValidationError("range must lie within [1, 2**63)")
    L = n1 - n0
    if L > _MAX_BLOCK_LEN:
        raise CapacityError(
            f"block of {L} integers exceeds the {_MAX_BLOCK_LEN} capacity; "
            "iterate segments with iter_blocks"
        )
    wlo, whi = _window_bounds(config)
    om = np.zeros(L, dtype=np.uint8)
    wom = np.zeros(L, dtype=np.uint8)
    wsq = np.zeros(L, dtype=bool)
    if L > 0:
        if L <= _SMALL_RANGE:
            base = _base_primes(math.isqrt(n1 - 1))
            for i in range(L):
                o, w, s = _factor_one(n0 + i, base, wlo, whi)
                om[i], wom[i], wsq[i] = o, w, s
        else:
            for a in range(n0, n1, config.block_size):
                b = min(a + config.block_size, n1)
                i = a - n0
                _sieve_segment(a, b, wlo, whi, om[i:i + b - a],
                               wom[i:i + b - a], wsq[i:i + b - a])
    lam = np.where(om & 1, -1, 1).astype(np.int8)
    P, Q = (0.0, 0.0) if config.prime_window is None else (
        float(config.prime_window[0]), float(config.prime_window[1]))
    return FactorBlock(n0, n1, P, Q, om, lam, wom, wsq)


def iter_blocks(rng: tuple[int, int], config: SieveConfig = SieveConfig()) -> Iterator[FactorBlock]:
    """Yield consecutive FactorBlocks of at most config.block_size covering rng."""
    n0, n1 = int(rng[0]), int(rng[1])
    if n1 < n0:
        raise ValidationError(f"range [{n0}, {n1}) is reversed")
    for a in range(n0, n1, config.block_size):
        b = min(a + config.block_size, n1)
        yield sieve_block((a, b), config)


def primes_in(lo: float, hi: float) -> np.ndarray:
    """Primes p with lo <= p <= hi (real inclusive endpoints), ascending int64."""
    if math.isnan(lo) or math.isnan(hi):
        raise ValidationError("prime interval endpoints must be numbers")
    a = max(2, math.ceil(lo))
    b = math.floor(hi)
    if b < a:
        return np.empty(0, dtype=np.int64)
    if b >= 2**63:
        raise ValidationError("prime interval must lie within [2, 2**63)")
    if b - a + 1 > _MAX_BLOCK_LEN:
        raise CapacityError("prime interval too long; enumerate in segments")
    base = _base_primes(math.isqrt(b))
    flags = np.ones(b - a + 1, dtype=bool)
    if a <= 1:
        flags[: 2 - a] = False
    for p in base.tolist():
        start = max(p * p, (-(a // -p)) * p)
        if start <= b:
            flags[start - a :: p] = False
    return (np.flatnonzero(flags) + a).astype(np.int64)


def rough_count(X: int, P: float, Q: float) -> int:
    """#{n in [X, 2X] : no prime factor of n lies in [P, Q]}, exact."""
    if not (2 <= P <= Q):
        raise ValidationError("rough_count requires 2 <= P <= Q")
    X = int(X)
    if X < 1:
        raise ValidationError("X must be >= 1")
    config = SieveConfig(prime_window=(P, Q))
    total = 0
    for block in iter_blocks((X, 2 * X + 1), config):
        total += int(np.count_nonzero(block.window_omega == 0))
    return total
