"""How much does lambda cancel in short intervals?

For windows of length h = X^delta above each integer x in [X, 2X), the
average (1/h) sum_{x < n <= x+h} lambda(n) should be small for almost
every x.  The variance of these window averages is computed exactly
(integer sliding sums, no quadrature), and shrinks as X grows.
"""
import math

from sil import build_series, compute_variance, exceptional_measure, liouville

print(f"{'X':>10} {'h':>6} {'variance':>12} {'scaled':>12} {'exc. frac':>10}")
for X in (10 ** 4, 10 ** 5, 10 ** 6):
    series = build_series(liouville(), X, 0.5)
    rep = compute_variance(series)
    scaled = rep.variance * math.log(X) ** (1 / 3)
    print(f"{X:>10} {series.h:>6} {rep.variance:>12.6g} {scaled:>12.6g}"
          f" {rep.exceptional_fraction:>10.4g}")

# the exceptional set: windows whose average exceeds a threshold.
# Chebyshev gives fraction <= variance / threshold^2; both sides are
# computed and the inequality is rechecked on every call.
X = 10 ** 5
series = build_series(liouville(), X, 0.5)
rep = compute_variance(series)
for thr in (0.05, 0.1, 0.2):
    frac = exceptional_measure(series, thr)
    print(f"threshold {thr:4}: fraction {frac:.5f} "
          f"(Chebyshev cap {rep.variance / thr ** 2:.5f})")
