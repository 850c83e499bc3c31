"""Command-line front end.

One subcommand per pipeline: sieve | variance | meansq | ramare | dyadic |
lemma-profiles | study.  CSV goes to --out (stdout by default) with 17
significant digits; JSON is emitted with sorted keys and a "schema": 1
marker.  Exit codes: 0 success, 2 validation/capacity/usage errors, 3 a
flagged invariant (a computed check failed or a required estimate did not
meet its refinement tolerance).

Precedence for shared knobs is flags > environment > defaults, with
SIL_THREADS for the worker count and SIL_CACHE_DIR for the sieve block
cache directory.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from .cache import cached_sieve_block
from .decomp import dyadic_split, qjh_sup_profile, ramare_decompose, reconstruct_main
from .dirichlet import (eval_grid, from_dense, lemma1_profile, lemma2_profile,
                        mean_square, mvt_ratio)
from .errors import (CapacityError, EvaluationError, FlaggedInvariant,
                     ValidationError)
from .intervals import build_series, compute_variance
from .multiplicative import builtin, from_rule_file, values_over
from .parallel import resolve_threads
from .pipeline import scaling_study, study_csv, study_json_dict
from .sieve import SieveConfig

_RECONSTRUCT_TOL = 1e-9


def _fmt17(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _resolve_f(args):
    if getattr(args, "rule_file", None):
        return from_rule_file(args.rule_file)
    return builtin(args.f, seed=args.seed)


def _int_list(text: str) -> list[int]:
    return [int(float(part)) for part in text.split(",") if part.strip()]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _add_function_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--f", default="liouville",
                   choices=["liouville", "one", "moebius", "random"],
                   help="built-in multiplicative function")
    p.add_argument("--seed", type=int, default=None,
                   help="64-bit seed for --f random")
    p.add_argument("--rule-file", default=None,
                   help="prime-power rule file ('p k value' lines; overrides --f)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sil")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker threads (default: SIL_THREADS or 1)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", help="factor-data summary for a block")
    p.add_argument("--n0", type=lambda s: int(float(s)), required=True)
    p.add_argument("--n1", type=lambda s: int(float(s)), required=True,
                   help="exclusive upper end")
    p.add_argument("--P", type=float, default=None)
    p.add_argument("--Q", type=float, default=None)
    p.add_argument("--cache-dir", default=None,
                   help="block cache directory (default: SIL_CACHE_DIR; unset disables)")
    p.add_argument("--out", default=None)

    p = sub.add_parser("variance", help="short-interval variance statistics")
    p.add_argument("--X", type=lambda s: int(float(s)), required=True)
    p.add_argument("--delta", type=float, required=True)
    _add_function_flags(p)
    p.add_argument("--subtract-mean", action="store_true")
    p.add_argument("--threshold", type=float, default=None,
                   help="exceptional-set threshold (default (log X)^(-1/9))")
    p.add_argument("--out", default=None)

    p = sub.add_parser("meansq", help="mean square of the range polynomial")
    p.add_argument("--X", type=lambda s: int(float(s)), required=True)
    p.add_argument("--t1", type=float, default=0.0)
    p.add_argument("--t2", type=float, required=True)
    _add_function_flags(p)
    p.add_argument("--step-scale", type=float, default=1.0)
    p.add_argument("--max-points", type=int, default=None)
    p.add_argument("--mvt", action="store_true",
                   help="also report the mean value theorem ratio at T = t2")
    p.add_argument("--dump-grid", default=None,
                   help="write the sampled grid as CSV (t,re,im,abs)")
    p.add_argument("--out", default=None)

    p = sub.add_parser("ramare", help="prime-factor extraction identity report")
    p.add_argument("--X", type=lambda s: int(float(s)), required=True)
    p.add_argument("--P", type=float, required=True)
    p.add_argument("--Q", type=float, required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("dyadic", help="bin-product split and reconstruction check")
    p.add_argument("--X", type=lambda s: int(float(s)), required=True)
    p.add_argument("--P", type=float, required=True)
    p.add_argument("--Q", type=float, required=True)
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--t", type=float, action="append", default=None,
                   help="reconstruction test point (repeatable; default 0)")
    p.add_argument("--sup-T0", type=float, default=None,
                   help="with --sup-T, add per-bin sampled sup rows")
    p.add_argument("--sup-T", type=float, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("lemma-profiles",
                       help="small-t sup and prime-sum bound profiles")
    p.add_argument("--X", type=lambda s: int(float(s)), required=True)
    p.add_argument("--A", type=float, default=2.0)
    p.add_argument("--P", type=float, default=None)
    p.add_argument("--Q", type=float, default=None)
    p.add_argument("--t-samples", type=_float_list, default=None,
                   help="comma-separated t values for the prime-sum profile")
    p.add_argument("--out", default=None)

    p = sub.add_parser("study", help="scaling study over (X, delta) grid")
    p.add_argument("--X-list", type=_int_list, required=True)
    p.add_argument("--deltas", type=_float_list, default=[0.5])
    _add_function_flags(p)
    p.add_argument("--subtract-mean", action="store_true")
    p.add_argument("--max-poly-X", type=lambda s: int(float(s)), default=20_000)
    p.add_argument("--t-budget", type=int, default=250_000)
    p.add_argument("--tail-points", type=int, default=8001)
    p.add_argument("--step-scale", type=float, default=1.0)
    p.add_argument("--out", default=None, help="JSON output path")
    p.add_argument("--csv", default=None, help="also write a CSV summary here")
    return ap


def _cmd_sieve(args, threads: int) -> int:
    cache_dir = args.cache_dir or os.environ.get("SIL_CACHE_DIR") or None
    if (args.P is None) != (args.Q is None):
        raise ValidationError("pass both --P and --Q, or neither")
    window = (args.P, args.Q) if args.P is not None else None
    cfg = SieveConfig(prime_window=window) if window else SieveConfig()
    blk = cached_sieve_block((args.n0, args.n1), cfg, cache_dir=cache_dir)
    report = {
        "schema": 1, "n0": blk.n0, "n1": blk.n1, "P": blk.P, "Q": blk.Q,
        "length": blk.n1 - blk.n0,
        "lambda_sum": int(blk.lam.astype(np.int64).sum()),
        "big_omega_max": int(blk.big_omega.max()) if blk.n1 > blk.n0 else 0,
        "window_rough_count": int(np.count_nonzero(blk.window_omega == 0)),
        "window_square_flagged": int(np.count_nonzero(blk.window_square_flag)),
    }
    _emit(_json_text(report), args.out)
    return 0


def _cmd_variance(args, threads: int) -> int:
    f = _resolve_f(args)
    t_start = time.perf_counter()
    series = build_series(f, args.X, args.delta,
                          subtract_mean=args.subtract_mean)
    rep = compute_variance(series, threshold=args.threshold)
    seconds = time.perf_counter() - t_start
    header = "X,delta,h,variance,threshold,exceptional_fraction,seconds"
    row = ",".join([str(rep.X), _fmt17(rep.delta), str(rep.h),
                    _fmt17(rep.variance), _fmt17(rep.threshold),
                    _fmt17(rep.exceptional_fraction), _fmt17(seconds)])
    _emit(header + "\n" + row + "\n", args.out)
    return 0


def _cmd_meansq(args, threads: int) -> int:
    f = _resolve_f(args)
    poly = from_dense(args.X, values_over(f, args.X, 2 * args.X + 1))
    ms = mean_square(poly, args.t1, args.t2, step_scale=args.step_scale,
                     max_points=args.max_points, threads=threads)
    report = {
        "schema": 1, "X": args.X, "f": f.name, "t1": ms.t1, "t2": ms.t2,
        "grid_step": ms.grid_step, "value": ms.value,
        "refined_value": ms.refined_value, "rel_gap": ms.rel_gap,
        "method": ms.method, "points": ms.points,
        "subsampled": ms.subsampled, "flagged": ms.flagged,
    }
    if args.mvt:
        report["mvt_ratio"] = mvt_ratio(poly, args.t2,
                                        max_points=args.max_points,
                                        threads=threads)
    if args.dump_grid:
        dt = ms.grid_step / 2.0
        npts = ms.points
        if float(npts) * poly.nnz > 2.5e10:
            raise CapacityError("grid dump too large; pass --max-points")
        vals = eval_grid(poly, ms.t1, dt, npts, threads=threads)
        lines = ["t,re,im,abs"]
        for k in range(npts):
            v = vals[k]
            lines.append(",".join([_fmt17(ms.t1 + k * dt), _fmt17(v.real),
                                   _fmt17(v.imag), _fmt17(abs(v))]))
        _emit("\n".join(lines) + "\n", args.dump_grid)
    _emit(_json_text(report), args.out)
    if ms.flagged:
        print(f"flagged: grid disagreement {ms.rel_gap:.3g} exceeds 0.01; "
              "refine with --max-points or --step-scale", file=sys.stderr)
        return 3
    return 0


def _cmd_ramare(args, threads: int) -> int:
    dec = ramare_decompose(args.X, args.P, args.Q, args.t)
    _emit(_json_text(dec.report()), args.out)
    return 0


def _cmd_dyadic(args, threads: int) -> int:
    split = dyadic_split(args.X, args.P, args.Q, args.H)
    t_points = args.t if args.t else [0.0]
    checks = []
    worst = 0.0
    for t in t_points:
        rec = reconstruct_main(split, t)
        main = ramare_decompose(args.X, args.P, args.Q, t).main
        gap = abs(rec - main) / max(abs(main), 1e-300)
        worst = max(worst, gap)
        checks.append({"t": t, "reconstruction": [rec.real, rec.imag],
                       "main": [main.real, main.imag], "rel_gap": gap})
    d_values = [float(v) for v in split.d_exact.values()]
    report = {
        "schema": 1, "X": split.X, "P": split.P, "Q": split.Q, "H": split.H,
        "j_lo": split.j_lo, "j_hi": split.j_hi,
        "bins_nonempty": sum(1 for _, q, _ in split.factors if q.nnz),
        "boundary_lower_count": split.boundary_lower.nnz,
        "boundary_upper_count": split.boundary_upper.nnz,
        "d_abs_max": max((abs(v) for v in d_values), default=0.0),
        "checks": checks,
    }
    if args.sup_T is not None:
        rows = qjh_sup_profile(split, split.X, args.sup_T0 or 0.0, args.sup_T,
                               threads=threads)
        report["bin_sup"] = [{"j": r.j, "primes": r.prime_count,
                              "sup": r.sup, "t_at": r.t_at} for r in rows]
    _emit(_json_text(report), args.out)
    if worst > _RECONSTRUCT_TOL:
        print(f"flagged: reconstruction gap {worst:.3g} exceeds "
              f"{_RECONSTRUCT_TOL}", file=sys.stderr)
        return 3
    return 0


def _cmd_lemma_profiles(args, threads: int) -> int:
    sup = lemma1_profile(args.X, args.A, threads=threads)
    report = {
        "schema": 1, "X": args.X, "A": args.A,
        "small_t_sup": {"T": math.log(args.X) ** args.A, "value": sup.value,
                        "t_at": sup.t_at, "points": sup.points},
    }
    if (args.P is None) != (args.Q is None):
        raise ValidationError("pass both --P and --Q, or neither")
    if args.P is not None:
        samples = args.t_samples
        if samples is None:
            samples = sorted({0.0, 1.0, float(args.X) ** 0.25,
                              float(args.X) ** 0.5, float(args.X) ** 0.75,
                              float(args.X)})
        rows = lemma2_profile(args.P, args.Q, args.X, samples)
        report["prime_sum"] = [{"t": r.t, "abs": r.abs_value,
                                "bound_ratio": r.bound_ratio} for r in rows]
    _emit(_json_text(report), args.out)
    return 0


def _cmd_study(args, threads: int) -> int:
    f = _resolve_f(args)
    study = scaling_study(args.deltas, args.X_list, f,
                          subtract_mean=args.subtract_mean,
                          max_poly_X=args.max_poly_X,
                          t_budget=args.t_budget,
                          tail_points=args.tail_points,
                          step_scale=args.step_scale, threads=threads)
    _emit(_json_text(study_json_dict(study)), args.out)
    if args.csv:
        _emit(study_csv(study), args.csv)
    return 0


_COMMANDS = {
    "sieve": _cmd_sieve,
    "variance": _cmd_variance,
    "meansq": _cmd_meansq,
    "ramare": _cmd_ramare,
    "dyadic": _cmd_dyadic,
    "lemma-profiles": _cmd_lemma_profiles,
    "study": _cmd_study,
}


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = e.code if e.code is not None else 0
        return int(code) if int(code) == 0 else 2
    threads = resolve_threads(args.threads)
    try:
        return _COMMANDS[args.command](args, threads)
    except (ValidationError, CapacityError, EvaluationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FlaggedInvariant as e:
        print(f"flagged: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
