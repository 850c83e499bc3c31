"""Bounded multiplicative functions f: N -> [-1, 1] evaluated from sieve data.

A MultiplicativeFunction is defined by its values on prime powers, with
f(1) = 1 implicitly and f(mn) = f(m) f(n) for coprime m, n.  Built-ins:

    liouville      f(p) = -1, completely multiplicative: lambda(n)
    one            f(p^k) = 1: the constant 1
    moebius        f(p) = -1, f(p^k) = 0 for k >= 2 (vanishes unless the
                   argument is squarefree; exercises the k >= 2 rule path)
    random_pm1     completely multiplicative with f(p) = +-1 drawn from a
                   64-bit hash of (seed, p); a pure function of seed and p,
                   so values are independent of evaluation order, block
                   boundaries, and thread count

Block evaluation runs the segmented sieve in value-accumulation mode: for
each prime power q = p^k dividing n the value picks up the factor that turns
f(p^(k-1)) into f(p^k).  Completely multiplicative functions multiply by
f(p) once per power; general functions track the exact exponent and look up
f(p^k) directly, so rules where some f(p^j) = 0 stay exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import EvaluationError, ValidationError
from .sieve import FactorBlock, SieveConfig, _base_primes, iter_blocks

_U64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class MultiplicativeFunction:
    name: str
    completely_multiplicative: bool
    integer_valued: bool
    prime_power_rule: Callable[[int, int], float]
    # vectorized f(p) over an int64 array of primes (first powers only);
    # used for the single prime factor above the segment square root
    prime_rule_vec: Callable[[np.ndarray], np.ndarray]
    seed: int | None = None

    def at_prime_power(self, p: int, k: int) -> float:
        v = float(self.prime_power_rule(p, k))
        if abs(v) > 1.0 + 1e-12:
            raise ValidationError(f"|f({p}^{k})| = {abs(v)} exceeds 1")
        return v


def liouville() -> MultiplicativeFunction:
    return MultiplicativeFunction(
        name="liouville",
        completely_multiplicative=True,
        integer_valued=True,
        prime_power_rule=lambda p, k: -1.0 if k & 1 else 1.0,
        prime_rule_vec=lambda ps: np.full(len(ps), -1.0),
    )


def constant_one() -> MultiplicativeFunction:
    return MultiplicativeFunction(
        name="one",
        completely_multiplicative=True,
        integer_valued=True,
        prime_power_rule=lambda p, k: 1.0,
        prime_rule_vec=lambda ps: np.ones(len(ps)),
    )


def moebius() -> MultiplicativeFunction:
    return MultiplicativeFunction(
        name="moebius",
        completely_multiplicative=False,
        integer_valued=True,
        prime_power_rule=lambda p, k: -1.0 if k == 1 else 0.0,
        prime_rule_vec=lambda ps: np.full(len(ps), -1.0),
    )


def _splitmix64_array(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = (x + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(_U64)
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & np.uint64(_U64)
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & np.uint64(_U64)
    return z ^ (z >> np.uint64(31))


def _splitmix64_int(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _U64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return z ^ (z >> 31)


def random_pm1(seed: int) -> MultiplicativeFunction:
    """Completely multiplicative f with f(p) = +-1 hashed from (seed, p)."""
    seed = int(seed) & _U64

    def rule_scalar(p: int, k: int) -> float:
        s = 1.0 if _splitmix64_int(seed ^ p) < 2**63 else -1.0
        return s if k & 1 else 1.0

    def rule_vec(ps: np.ndarray) -> np.ndarray:
        z = _splitmix64_array(ps.astype(np.uint64) ^ np.uint64(seed))
        return np.where(z >> np.uint64(63), -1.0, 1.0)

    return MultiplicativeFunction(
        name="random-pm1",
        completely_multiplicative=True,
        integer_valued=True,
        prime_power_rule=rule_scalar,
        prime_rule_vec=rule_vec,
        seed=seed,
    )


def from_rule_file(path: str, name: str | None = None) -> MultiplicativeFunction:
    """Parse a function definition file.

    Lines are whitespace-separated "p k value" triples; a line "* 1 v"
    declares f(p) = v for every prime (completely multiplicative fallback).
    Explicit (p, k) lines take precedence over the star rule.  Blank lines
    and lines starting with '#' are ignored.
    """
    rules: dict[tuple[int, int], float] = {}
    star: float | None = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValidationError(f"{path}:{lineno}: expected 'p k value'")
            p_tok, k_tok, v_tok = parts
            try:
                k = int(k_tok)
                v = float(v_tok)
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
            if abs(v) > 1.0:
                raise ValidationError(
                    f"{path}:{lineno}: |value| = {abs(v)} exceeds 1")
            if p_tok == "*":
                if k != 1:
                    raise ValidationError(f"{path}:{lineno}: star rule needs k = 1")
                star = v
                continue
            p = int(p_tok)
            if p < 2 or k < 1:
                raise ValidationError(f"{path}:{lineno}: need p >= 2, k >= 1")
            rules[(p, k)] = v

    def rule(p: int, k: int) -> float:
        hit = rules.get((p, k))
        if hit is not None:
            return hit
        if star is not None:
            return star ** k
        raise EvaluationError(f"no rule for prime power {p}^{k}")

    def rule_vec(ps: np.ndarray) -> np.ndarray:
        return np.array([rule(int(p), 1) for p in ps], dtype=np.float64)

    values = list(rules.values()) + ([star] if star is not None else [])
    return MultiplicativeFunction(
        name=name or path.rsplit("/", 1)[-1].rsplit(".", 1)[0],
        completely_multiplicative=star is not None and not rules,
        integer_valued=all(float(v).is_integer() for v in values),
        prime_power_rule=rule,
        prime_rule_vec=rule_vec,
    )


BUILTINS = {
    "liouville": liouville,
    "one": constant_one,
    "moebius": moebius,
}


def builtin(name: str, seed: int | None = None) -> MultiplicativeFunction:
    """Look up a built-in by name; 'random' requires a seed."""
    if name in ("random", "random-pm1"):
        if seed is None:
            raise ValidationError("random-pm1 requires a seed")
        return random_pm1(seed)
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValidationError(
            f"unknown function {name!r}; choose from "
            f"{sorted(BUILTINS) + ['random-pm1']}") from None


def _value_segment(f: MultiplicativeFunction, a: int, b: int) -> np.ndarray:
    """Value-accumulation sieve over [a, b)."""
    L = b - a
    val = np.ones(L, dtype=np.float64)
    if L == 0:
        return val
    top = b - 1
    rem = np.arange(a, b, dtype=np.int64)
    exps = np.zeros(L, dtype=np.uint8)
    for p in _base_primes(math.isqrt(top)).tolist():
        if f.completely_multiplicative:
            fp = f.at_prime_power(p, 1)
            q = p
            while q <= top:
                start = (-(a // -q)) * q - a
                if start < L:
                    sl = slice(start, L, q)
                    val[sl] *= fp
                    rem[sl] //= p
                q *= p
        else:
            q = p
            kmax = 0
            while q <= top:
                start = (-(a // -q)) * q - a
                if start < L:
                    sl = slice(start, L, q)
                    exps[sl] += 1
                    rem[sl] //= p
                    kmax += 1
                q *= p
            if kmax:
                start = (-(a // -p)) * p - a
                sl = slice(start, L, p)
                table = np.array([1.0] + [f.at_prime_power(p, k)
                                          for k in range(1, kmax + 1)])
                val[sl] *= table[exps[sl]]
                exps[sl] = 0
    big = rem > 1
    if np.any(big):
        val[big] *= f.prime_rule_vec(rem[big])
    if a <= 1 < b:
        val[1 - a] = 1.0  # f(1) = 1, the empty product
    return val


def evaluate_on_block(f: MultiplicativeFunction, block: FactorBlock) -> np.ndarray:
    """Array of f(n) for n in [block.n0, block.n1), float64."""
    if f.name == "liouville":
        return block.lam.astype(np.float64)
    if f.name == "one":
        return np.ones(len(block))
    out = _value_segment(f, block.n0, block.n1)
    bad = np.abs(out) > 1.0 + 1e-12
    if np.any(bad):
        n = block.n0 + int(np.flatnonzero(bad)[0])
        raise ValidationError(f"|f({n})| = {abs(out[n - block.n0])} exceeds 1")
    return out


def values_over(f: MultiplicativeFunction, n0: int, n1: int,
                config: SieveConfig = SieveConfig()) -> np.ndarray:
    """f(n) for n in [n0, n1), computed segment-by-segment."""
    out = np.empty(n1 - n0, dtype=np.float64)
    for block in iter_blocks((n0, n1), config):
        out[block.n0 - n0: block.n1 - n0] = evaluate_on_block(f, block)
    return out


def mean_over(f: MultiplicativeFunction, X: int) -> float:
    """(1/X) * sum_{X <= n <= 2X} f(n), inclusive ends.

    Exact for integer-valued f (integer sum divided once at the end);
    compensated summation otherwise.
    """
    num, den = mean_fraction_parts(f, X)
    return num / den


def mean_fraction(f: MultiplicativeFunction, X: int) -> Fraction:
    """Exact mean as a Fraction; integer-valued f only."""
    if not f.integer_valued:
        raise ValidationError("exact mean needs an integer-valued function")
    num, den = mean_fraction_parts(f, X)
    return Fraction(int(num), int(den))


def mean_fraction_parts(f: MultiplicativeFunction, X: int) -> tuple[float | int, int]:
    """(numerator, X) with the numerator an exact int when f is integer-valued."""
    X = int(X)
    if X < 2:
        raise ValidationError("mean_over requires X >= 2")
    if f.integer_valued:
        total = 0
        for block in iter_blocks((X, 2 * X + 1)):
            vals = evaluate_on_block(f, block)
            total += int(np.rint(vals).astype(np.int64).sum())
        return total, X
    parts = [float(np.sum(evaluate_on_block(f, block)))
             for block in iter_blocks((X, 2 * X + 1))]
    return math.fsum(parts), X
