"""Factor data for a range of integers, computed blockwise.

A FactorBlock carries, for every n in [n0, n1): the completely
multiplicative sign lambda(n) = (-1)^Omega(n), the prime-factor count
Omega(n), and two fields tied to a prime window [P, Q]: how many distinct
window primes divide n, and whether some window prime divides n twice.
"""
import numpy as np

from sil import SieveConfig, cached_sieve_block, sieve_block

cfg = SieveConfig(prime_window=(10.0, 100.0))
blk = sieve_block((10 ** 6, 10 ** 6 + 20), cfg)

print(f"block [{blk.n0}, {blk.n1}) with window [{blk.P:g}, {blk.Q:g}]")
for i in range(len(blk)):
    n = blk.n0 + i
    mark = " square-window" if blk.window_square_flag[i] else ""
    print(f"  n={n}  lambda={blk.lam[i]:+d}  Omega={blk.big_omega[i]}"
          f"  window_omega={blk.window_omega[i]}{mark}")

# sign sums over a longer stretch: cancellation sets in quickly
wide = sieve_block((10 ** 6, 10 ** 6 + 10 ** 5))
s = np.cumsum(wide.lam.astype(np.int64))
print(f"\npartial sums of lambda over [{wide.n0}, {wide.n1}):"
      f" final {s[-1]}, max |partial| {np.max(np.abs(s))}")

# blocks can be cached on disk; the second call reads the file back
import tempfile

with tempfile.TemporaryDirectory() as d:
    a = cached_sieve_block((5000, 6000), cfg, cache_dir=d)
    b = cached_sieve_block((5000, 6000), cfg, cache_dir=d)
    print("\ncache roundtrip equal:", np.array_equal(a.lam, b.lam))
