"""Multiplicative functions in short intervals: segmented factor sieves,
sliding-window variance statistics, Dirichlet polynomial mean squares, and
the identity-level decompositions tying them together."""

from .errors import (SilError, ValidationError, CapacityError,
                     EvaluationError, FlaggedInvariant)
from .sieve import (SieveConfig, FactorBlock, sieve_block, iter_blocks,
                    primes_in, primes_up_to, rough_count)
from .cache import (write_block_file, read_block_file, block_cache_path,
                    cached_sieve_block)
from .multiplicative import (MultiplicativeFunction, liouville, constant_one,
                             moebius, random_pm1, from_rule_file, builtin,
                             evaluate_on_block, values_over, mean_over,
                             mean_fraction)
from .intervals import (IntervalSumSeries, VarianceReport, sliding_sums,
                        compute_variance, exceptional_measure, build_series)
from .dirichlet import (DirichletPoly, MeanSquareEstimate, ProfileRow,
                        SampledSup, from_dense, from_pairs, zero_poly,
                        liouville_poly, prime_poly, eval_at, eval_grid,
                        mean_square, mean_square_product, mvt_ratio,
                        sampled_sup, lemma1_profile, lemma2_profile)
from .decomp import (RamareDecomposition, DyadicSplit, BinSupRow,
                     ramare_decompose, dyadic_split, reconstruct_main,
                     qjh_sup_profile)
from .pipeline import (PipelineConfig, CompareReport, ChainReport, StudyRow,
                       ScalingStudy, lemma3_compare, compare_from_values,
                       lemma4_chain, scaling_study, study_json_dict,
                       study_csv)

__version__ = "0.1.0"

__all__ = [
    "SilError", "ValidationError", "CapacityError", "EvaluationError",
    "FlaggedInvariant",
    "SieveConfig", "FactorBlock", "sieve_block", "iter_blocks", "primes_in",
    "primes_up_to", "rough_count",
    "write_block_file", "read_block_file", "block_cache_path",
    "cached_sieve_block",
    "MultiplicativeFunction", "liouville", "constant_one", "moebius",
    "random_pm1", "from_rule_file", "builtin", "evaluate_on_block",
    "values_over", "mean_over", "mean_fraction",
    "IntervalSumSeries", "VarianceReport", "sliding_sums",
    "compute_variance", "exceptional_measure", "build_series",
    "DirichletPoly", "MeanSquareEstimate", "ProfileRow", "SampledSup",
    "from_dense", "from_pairs", "zero_poly", "liouville_poly", "prime_poly",
    "eval_at", "eval_grid", "mean_square", "mean_square_product",
    "mvt_ratio", "sampled_sup", "lemma1_profile", "lemma2_profile",
    "RamareDecomposition", "DyadicSplit", "BinSupRow", "ramare_decompose",
    "dyadic_split", "reconstruct_main", "qjh_sup_profile",
    "PipelineConfig", "CompareReport", "ChainReport", "StudyRow",
    "ScalingStudy", "lemma3_compare", "compare_from_values", "lemma4_chain",
    "scaling_study", "study_json_dict", "study_csv",
]
