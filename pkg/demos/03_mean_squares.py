"""Oscillating sums F(1+it) = sum a_n / n^{1+it} and their mean squares.

The estimator is a trapezoid rule on a grid tied to the polynomial
length, with a half-step refinement recorded alongside; when a closed
form over coefficient pairs is cheaper than the grid, that route is used
instead (the two agree to rounding).
"""
import numpy as np

from sil import (eval_at, from_dense, liouville_poly, mean_square, mvt_ratio,
                 prime_poly, sampled_sup)

poly = liouville_poly(10 ** 4)  # lambda(n)/n on [1e4, 2e4]

for T in (1.0, 10.0, 100.0):
    ms = mean_square(poly, 0.0, T)
    print(f"mean square over [0, {T:>5}]: {ms.refined_value:.6e}"
          f"  (grid gap {ms.rel_gap:.2e}, method {ms.method})")

# classical scale: the integral up to T is O((T + length) * sum a_n^2/n^2)
for T in (100.0, 10 ** 4):
    print(f"mean value ratio at T={T:>7}: {mvt_ratio(poly, T):.4f}")

# random signs behave the same way
rng = np.random.default_rng(1)
rand = from_dense(10 ** 4, rng.choice([-1.0, 1.0], size=10 ** 4 + 1))
print(f"random signs, T=1e3:      {mvt_ratio(rand, 10 ** 3.0):.4f}")

# prime-restricted sums are tiny on the 1-line once t moves away from 0
pp = prime_poly(100.0, 1000.0)
print(f"\nsum 1/p over [100, 1000]: {eval_at(pp, 0.0).real:.6f} "
      f"({pp.nnz} primes)")
s = sampled_sup(pp, 5.0, 50.0)
print(f"sup |P(1+it)| for t in [5, 50]: {s.value:.6f} at t = {s.t_at:.2f}")
