"""Sliding-window short-interval sums, exact variance, exceptional measure.

For integer k in [X, 2X) the window sum is S(k) = sum_{k+1 <= n <= k+h} f(n).
Because h is an integer the map x -> sum_{x <= n <= x+h} f(n) is constant on
every open interval (k, k+1), so the variance integral

    V = (1/X) * integral_X^{2X} |(1/h) S(x) - m|^2 dx

collapses to the finite sum (1/X) * sum_{k=X}^{2X-1} |(1/h) S(k) - m|^2 with
no quadrature error (m is the global mean when subtract_mean, else 0).

For integer-valued f everything stays exact: S(k) is an int64 prefix-sum
difference, the mean is the exact rational mean_num/mean_den, and the
deviation numerators d_k = S(k)*mean_den - h*mean_num are exact int64
(|d_k| < 2^53, so their float64 squares are correctly rounded inputs to the
compensated total).  The variance accumulates with math.fsum over fixed
2^20-element chunk sums, which keeps the reduction deterministic and
independent of thread count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FlaggedInvariant, ValidationError
from .multiplicative import MultiplicativeFunction, evaluate_on_block
from .sieve import SieveConfig, iter_blocks

_CHUNK = 1 << 20


@dataclass
class IntervalSumSeries:
    X: int
    h: int
    sums: np.ndarray  # S(k) for k = X .. 2X-1; int64 (exact) or float64
    subtract_mean: bool
    mean: float
    # exact mean = mean_num / mean_den when f is integer-valued, else None
    mean_num: int | None = None
    mean_den: int | None = None
    delta: float | None = None


def sliding_sums(values: np.ndarray, h: int, *, subtract_mean: bool = False,
                 mean: float = 0.0, mean_num: int | None = None,
                 mean_den: int | None = None,
                 delta: float | None = None) -> IntervalSumSeries:
    """Window sums from a value array covering [X, 2X + h].

    values[i] must be f(X + i); X is implied by len(values) = X + h + 1.
    Integer dtypes keep the whole series exact.
    """
    h = int(h)
    if h < 1:
        raise ValidationError("window length h must be >= 1")
    X = len(values) - h - 1
    if X < 1:
        raise ValidationError(
            f"need values on [X, 2X+h]; got {len(values)} values for h = {h}")
    if np.issubdtype(values.dtype, np.integer):
        pref = np.zeros(len(values) + 1, dtype=np.int64)
        np.cumsum(values, dtype=np.int64, out=pref[1:])
    else:
        pref = np.zeros(len(values) + 1, dtype=np.float64)
        np.cumsum(values, dtype=np.float64, out=pref[1:])
    # S(k) for k = X+j: values[j+1 .. j+h] inclusive -> pref[j+h+1] - pref[j+1]
    sums = pref[h + 1: h + 1 + X] - pref[1: 1 + X]
    return IntervalSumSeries(X=X, h=h, sums=sums, subtract_mean=subtract_mean,
                             mean=float(mean), mean_num=mean_num,
                             mean_den=mean_den, delta=delta)


def _chunked_fsum(arr: np.ndarray) -> float:
    """Deterministic compensated total: fsum over fixed-size chunk sums."""
    if len(arr) <= _CHUNK:
        return math.fsum(arr)
    return math.fsum(
        float(np.sum(arr[i: i + _CHUNK])) for i in range(0, len(arr), _CHUNK))


def _deviation_data(series: IntervalSumSeries) -> tuple[np.ndarray, float]:
    """(deviation numerators d_k, scale) with (1/h)S - m = d_k / scale."""
    s = series
    exact_mean = s.mean_num is not None and s.mean_den is not None
    if (np.issubdtype(s.sums.dtype, np.integer)
            and (not s.subtract_mean or exact_mean)):
        num = s.mean_num if s.subtract_mean else 0
        den = s.mean_den if s.subtract_mean else 1
        d = s.sums * np.int64(den) - np.int64(s.h) * np.int64(num)
        return d.astype(np.float64), float(s.h) * float(den)
    m = s.mean if s.subtract_mean else 0.0
    return s.sums.astype(np.float64) / s.h - m, 1.0


@dataclass(frozen=True)
class VarianceReport:
    X: int
    delta: float
    h: int
    variance: float
    threshold: float
    exceptional_fraction: float
    subtract_mean: bool
    mean: float


def compute_variance(series: IntervalSumSeries,
                     threshold: float | None = None) -> VarianceReport:
    """Exact-sum variance plus the exceptional fraction at threshold.

    threshold defaults to (log X)^(-1/9).  The Chebyshev inequality
    exceptional_fraction <= variance / threshold^2 is rechecked on the raw
    accumulators and a violation raises FlaggedInvariant (it cannot occur
    mathematically; the check guards the implementation).
    """
    s = series
    if threshold is None:
        threshold = math.log(s.X) ** (-1.0 / 9.0) if s.X > 1 else 1.0
    if threshold <= 0:
        raise ValidationError("threshold must be positive")
    d, scale = _deviation_data(s)
    sq = _chunked_fsum(d * d)
    variance = sq / (scale * scale) / s.X
    cut = threshold * scale
    count = int(np.count_nonzero(np.abs(d) >= cut))
    frac = count / s.X
    # Chebyshev on the raw accumulators: count * cut^2 <= sum d^2
    if count * cut * cut > sq * (1.0 + 1e-12) + 1e-300:
        raise FlaggedInvariant(
            f"Chebyshev violated: {count} * {cut}^2 > {sq} at X = {s.X}")
    delta = s.delta if s.delta is not None else (
        math.log(s.h) / math.log(s.X) if s.X > 1 and s.h > 1 else 0.0)
    return VarianceReport(X=s.X, delta=float(delta), h=s.h,
                          variance=float(variance), threshold=float(threshold),
                          exceptional_fraction=float(frac),
                          subtract_mean=s.subtract_mean, mean=s.mean)


def exceptional_measure(series: IntervalSumSeries, threshold: float) -> float:
    """Fraction of k in [X, 2X) with |(1/h) S(k) - m| >= threshold."""
    if threshold <= 0:
        raise ValidationError("threshold must be positive")
    return compute_variance(series, threshold).exceptional_fraction


def build_series(f: MultiplicativeFunction, X: int, delta: float, *,
                 subtract_mean: bool = False,
                 config: SieveConfig = SieveConfig()) -> IntervalSumSeries:
    """Sieve [X, 2X+h], evaluate f, and assemble the series for (X, delta).

    h = floor(X**delta).  Integer-valued f flows through the exact int64
    path, including the exact rational mean.
    """
    X = int(X)
    if not 0.0 < delta < 1.0:
        raise ValidationError("delta must be in (0,1)")
    if X < 2:
        raise ValidationError("X must be >= 2")
    h = int(math.floor(X ** delta))
    if h < 1:
        raise ValidationError(f"window h = floor(X^delta) = {h} is empty")
    n0, n1 = X, 2 * X + h + 1
    if f.integer_valued:
        values = np.empty(n1 - n0, dtype=np.int64)
        for block in iter_blocks((n0, n1), config):
            if f.name == "liouville":
                seg = block.lam.astype(np.int64)
            else:
                seg = np.rint(evaluate_on_block(f, block)).astype(np.int64)
            values[block.n0 - n0: block.n1 - n0] = seg
        mean_num = int(values[: X + 1].sum())
        return sliding_sums(values, h, subtract_mean=subtract_mean,
                            mean=mean_num / X, mean_num=mean_num, mean_den=X,
                            delta=delta)
    values = np.empty(n1 - n0, dtype=np.float64)
    for block in iter_blocks((n0, n1), config):
        values[block.n0 - n0: block.n1 - n0] = evaluate_on_block(f, block)
    mean = _chunked_fsum(values[: X + 1]) / X
    return sliding_sums(values, h, subtract_mean=subtract_mean, mean=mean,
                        delta=delta)
