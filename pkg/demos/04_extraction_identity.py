"""Pulling a prime factor out of lambda(n), with exact bookkeeping.

Each n in [X, 2X] with a prime factor in the window [P, Q] is written as
n = pm and every such representation is weighted by 1/(omega_win(m)+1),
so the weights sum to 1 when the window part of n is squarefree.  The sum
over [X, 2X] then splits as

    lhs = main (extracted double sum) + rough (no window factor) + residual

where the residual collects the exact weight deficit of the n divisible
by the square of a window prime.  Nothing is approximated: the three
parts are computed independently and the identity is checked, not assumed.
"""
import json

from sil import ramare_decompose

dec = ramare_decompose(10 ** 4, 10.0, 100.0, t=0.0)
print(json.dumps(dec.report(), indent=2, sort_keys=True))

gap = abs(dec.lhs - dec.main - dec.rough - dec.residual)
print(f"\nidentity gap: {gap:.3e}")
print(f"residual supported on {dec.residual_support_count} integers, all "
      "divisible by the square of a window prime:")
print(" ", dec.support_n[:12].tolist(), "...")

# the deficit at each supported n has the closed form s/(w(w+1)) where
# w counts distinct window primes of n and s counts those dividing twice
n0, s0, w0 = int(dec.support_n[0]), int(dec.support_s[0]), int(dec.support_w[0])
print(f"e.g. n={n0}: deficit {s0}/({w0}*{w0 + 1})")
