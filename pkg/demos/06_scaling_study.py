"""The full pipeline across sizes, for lambda and for a seeded random f.

Each row computes the exact short-interval variance, compares it with
the mean-square estimate of the matching oscillating sum (the ratio
stays bounded by one constant across X), and tracks the classical
mean-value ratio.  Swapping the multiplicative function touches nothing
but the coefficients.
"""
from sil import liouville, random_pm1, scaling_study, study_csv

study = scaling_study([0.5], [1000, 3000, 10_000], f=liouville())
print(study_csv(study))

print("same pipeline, random signs on primes (seed 7), mean subtracted:")
rnd = scaling_study([0.5], [10 ** 4, 10 ** 5], f=random_pm1(7),
                    subtract_mean=True)
for row in rnd.rows:
    print(f"  X={row.X:>7}  variance={row.variance:.6g}")

# JSON output embeds the full configuration (function, seed, caps) and
# nulls wall-clock timing, so identical runs are byte-identical
import json

from sil import study_json_dict

doc = study_json_dict(rnd)
print("\nconfig:", json.dumps(doc["config"], sort_keys=True))
