"""Independent brute-force references used to check the fast paths.

Everything here is deliberately naive: trial division, double loops,
exact rational arithmetic.  Slow on purpose; too simple to share a bug
with the vectorized implementations under test.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction

_SIEVE_LIMIT = 200_000  # > sqrt(2 * 1e10), enough for 64-bit test draws


def _primes_to(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, int(limit ** 0.5) + 1):
        if flags[p]:
            flags[p * p:: p] = bytearray(len(range(p * p, limit + 1, p)))
    return [i for i in range(limit + 1) if flags[i]]


ORACLE_PRIMES = _primes_to(_SIEVE_LIMIT)


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization, ascending prime order."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out = []
    m = n
    for p in ORACLE_PRIMES:
        if p * p > m:
            break
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out.append((p, k))
    if m > 1:
        out.append((m, 1))
    return out


def big_omega(n: int) -> int:
    return sum(k for _, k in factorize(n))


def lam(n: int) -> int:
    return -1 if big_omega(n) % 2 else 1


def window_omega(n: int, P: float, Q: float) -> int:
    return sum(1 for p, _ in factorize(n) if P <= p <= Q)


def window_square(n: int, P: float, Q: float) -> bool:
    return any(k >= 2 for p, k in factorize(n) if P <= p <= Q)


def rough_brute(X: int, P: float, Q: float) -> int:
    return sum(1 for n in range(X, 2 * X + 1) if window_omega(n, P, Q) == 0)


def window_primes(P: float, Q: float) -> list[int]:
    lo = max(2, math.ceil(P))
    return [p for p in range(lo, math.floor(Q) + 1)
            if all(p % q for q in range(2, int(p ** 0.5) + 1))]


def weight_deficit(n: int, P: float, Q: float) -> Fraction:
    """1 - sum over window primes p | n of 1/(window_omega(n/p) + 1).

    Zero whenever the window part of n is squarefree; the extraction
    weights then sum to exactly 1.
    """
    ps = [p for p, _ in factorize(n) if P <= p <= Q]
    if not ps:
        return Fraction(0)
    return 1 - sum(Fraction(1, window_omega(n // p, P, Q) + 1) for p in ps)


def residual_fraction(X: int, P: float, Q: float) -> Fraction:
    """Exact t = 0 residual: sum of lam(n)/n * weight_deficit(n)."""
    tot = Fraction(0)
    for n in range(X, 2 * X + 1):
        d = weight_deficit(n, P, Q)
        if d:
            tot += Fraction(lam(n), n) * d
    return tot


def ramare_parts(X: int, P: float, Q: float, t: float) -> dict[str, complex]:
    """All four identity components by direct enumeration at 1 + it."""
    def term(n: int) -> complex:
        return cmath.exp(-1j * t * math.log(n)) / n

    lhs = main = rough = residual = 0j
    for n in range(X, 2 * X + 1):
        v = lam(n) * term(n)
        lhs += v
        ps = [p for p, _ in factorize(n) if P <= p <= Q]
        if not ps:
            rough += v
        else:
            got = sum(Fraction(1, window_omega(n // p, P, Q) + 1) for p in ps)
            residual += v * float(1 - got)
    for p in window_primes(P, Q):
        for m in range((X + p - 1) // p, 2 * X // p + 1):
            a_m = Fraction(lam(m), window_omega(m, P, Q) + 1)
            main += float(a_m) * lam(p) * term(m * p)
    return {"lhs": lhs, "main": main, "rough": rough, "residual": residual}


def variance_brute(values: list[int], X: int, h: int,
                   mean: float = 0.0) -> float:
    """(1/X) sum over k in [X, 2X) of |S(k)/h - mean|^2, double loop.

    values[i] holds f(X + i) and must cover [X, 2X + h]; S(k) sums the
    h integers in (k, k + h], the constant value of the moving window on
    the open unit interval just above k.
    """
    acc = 0.0
    for k in range(X, 2 * X):
        s = 0
        for n in range(k + 1, k + h + 1):
            s += values[n - X]
        acc += (s / h - mean) ** 2
    return acc / X
