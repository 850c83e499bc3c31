"""End-to-end assembly: short-interval variance vs mean squares of the
range polynomial, the full decomposition bound chain, and scaling studies.

Two comparisons are produced, both as measured ratios rather than asserted
inequalities (the underlying estimates carry unspecified absolute
constants; the test suite pins constants from a documented calibration
run):

 * compare: (1/X) sum_k |S(k)/h|^2 against the head integral
   int_0^{X^{1-delta}} |F(1+it)|^2 dt plus the dyadic tail sup
   max_T (X^{1-delta}/T) int_T^{2T}, where F carries the f values on
   [X, 2X] as coefficients.
 * chain: int_0^T |F|^2 dt term by term through the prime-factor
   extraction: a small-t piece, the window-rough polynomial, the maximal
   bin product (number-of-bins^2 times its mean square), and the two
   boundary polynomials, each against its claimed scale.

Default parameters follow the asymptotic choices H = (log X)^5,
T0 = (log X)^10, P = exp((log X)^{2/3+eps}), Q = X^{delta/3}.  At desk
scale the default window is empty (P > Q) and T0 exceeds X; the config
refuses the former loudly (pass both P and Q to choose a window) and caps
the latter at X^{1-delta}/4 so the chain keeps its term structure.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .decomp import _boundary_d, _frange, _poly_from_d
from .dirichlet import (DirichletPoly, from_dense, from_pairs, mean_square,
                        mean_square_product, mvt_ratio, sampled_sup)
from .errors import FlaggedInvariant, ValidationError
from .intervals import build_series, compute_variance, sliding_sums
from .multiplicative import MultiplicativeFunction, liouville, values_over
from .sieve import SieveConfig, primes_in, sieve_block

_TAIL_LIMIT_EXP = 2.0   # dyadic tail T sampled up to X**2 (heuristic cutoff)


@dataclass(frozen=True)
class PipelineConfig:
    X: int
    delta: float
    epsilon: float = 0.05
    A: float = 2.0
    H: float | None = None
    T0: float | None = None
    P: float | None = None
    Q: float | None = None
    f: MultiplicativeFunction = field(default_factory=liouville)
    t_budget: int = 250_000
    tail_points: int = 8001
    threads: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "X", int(self.X))
        if self.X < 3:
            raise ValidationError("X must be >= 3")
        if not (0.0 < self.delta < 1.0):
            raise ValidationError("delta must be in (0,1)")
        if self.epsilon <= 0:
            raise ValidationError("epsilon must be positive")
        if self.A <= 0:
            raise ValidationError("A must be positive")
        if self.t_budget < 100 or self.tail_points < 100:
            raise ValidationError("t_budget and tail_points must be >= 100")
        logX = math.log(self.X)
        if self.H is None:
            object.__setattr__(self, "H", logX ** 5)
        if self.H < 1:
            raise ValidationError("H must be >= 1")
        if self.T0 is None:
            object.__setattr__(
                self, "T0", min(logX ** 10, self.X ** (1.0 - self.delta) / 4.0))
        if self.T0 < 0:
            raise ValidationError("T0 must be nonnegative")
        if (self.P is None) != (self.Q is None):
            raise ValidationError("pass both P and Q, or neither")
        if self.P is None:
            P = math.exp(logX ** (2.0 / 3.0 + self.epsilon))
            Q = self.X ** (self.delta / 3.0)
            if P > Q:
                raise ValidationError(
                    f"default window is empty at X={self.X}: "
                    f"P=exp((log X)^(2/3+eps))={P:.4g} exceeds "
                    f"Q=X^(delta/3)={Q:.4g}; the asymptotic defaults need far "
                    "larger X -- pass explicit P and Q to choose the window")
            object.__setattr__(self, "P", P)
            object.__setattr__(self, "Q", Q)
        if not (2.0 <= self.P <= self.Q):
            raise ValidationError("window requires 2 <= P <= Q")
        if self.Q > 2 * self.X:
            raise ValidationError("window requires Q <= 2X")

    @property
    def h(self) -> int:
        return int(math.floor(self.X ** self.delta))


@dataclass(frozen=True)
class CompareReport:
    X: int
    delta: float
    h: int
    step_scale: float
    lhs: float
    rhs: float
    ratio: float
    head: float
    tail_max: float
    tail_T: float
    tail_count: int
    subsampled_tails: int
    tail_rel_gap_max: float
    flagged: bool

    def report(self) -> dict:
        return {"schema": 1, "X": self.X, "delta": self.delta, "h": self.h,
                "step_scale": self.step_scale, "lhs": self.lhs,
                "rhs": self.rhs, "ratio": self.ratio, "head": self.head,
                "tail_max": self.tail_max, "tail_T": self.tail_T,
                "tail_count": self.tail_count,
                "subsampled_tails": self.subsampled_tails,
                "tail_rel_gap_max": self.tail_rel_gap_max,
                "flagged": self.flagged}


def _dyadic_rhs(poly: DirichletPoly, X: int, delta: float, step_scale: float,
                tail_points: int, threads: int):
    """Head integral on [0, X^{1-delta}] plus the dyadic tail maximum.

    Tail windows [T, 2T] for T = X^{1-delta} 2^k are point-capped
    (tail_points) since their spans grow unboundedly; capped estimates are
    heuristic by design, so their refinement gaps are reported (worst gap
    and count) rather than escalated to the precision flag.
    """
    T1 = float(X) ** (1.0 - delta)
    head = mean_square(poly, 0.0, T1, step_scale=step_scale, threads=threads)
    flagged = head.flagged
    tail_max, tail_T = 0.0, T1
    count = subs = 0
    gap_max = 0.0
    T = T1
    t_stop = float(X) ** _TAIL_LIMIT_EXP
    while T <= t_stop:
        ms = mean_square(poly, T, 2.0 * T, step_scale=step_scale,
                         max_points=tail_points, threads=threads)
        v = (T1 / T) * ms.refined_value
        if v > tail_max:
            tail_max, tail_T = v, T
        if ms.subsampled:
            subs += 1
            gap_max = max(gap_max, ms.rel_gap)
        else:
            flagged = flagged or ms.flagged
        count += 1
        T *= 2.0
    return head.refined_value, tail_max, tail_T, count, subs, gap_max, flagged


def compare_from_values(values: np.ndarray, X: int, delta: float, *,
                        step_scale: float = 1.0, tail_points: int = 8001,
                        threads: int = 1) -> CompareReport:
    """Variance-vs-mean-square comparison from raw coefficients.

    values[i] is the coefficient of n = X + i and must cover [X, 2X + h],
    h = floor(X**delta).  No mean subtraction on either side.
    """
    X = int(X)
    if not (0.0 < delta < 1.0):
        raise ValidationError("delta must be in (0,1)")
    h = int(math.floor(X ** delta))
    if len(values) != X + h + 1:
        raise ValidationError(f"need {X + h + 1} values covering [X, 2X+h]")
    series = sliding_sums(np.asarray(values, dtype=np.float64), h,
                          subtract_mean=False)
    lhs = compute_variance(series).variance
    poly = from_dense(X, np.asarray(values[: X + 1], dtype=np.float64))
    head, tail_max, tail_T, count, subs, gap_max, flagged = _dyadic_rhs(
        poly, X, delta, step_scale, tail_points, threads)
    rhs = head + tail_max
    if rhs <= 0.0:
        if lhs > 0.0:
            raise FlaggedInvariant("zero mean-square bound for nonzero variance")
        ratio = 0.0
    else:
        ratio = lhs / rhs
    return CompareReport(X=X, delta=delta, h=h, step_scale=step_scale,
                         lhs=lhs, rhs=rhs, ratio=ratio, head=head,
                         tail_max=tail_max, tail_T=tail_T, tail_count=count,
                         subsampled_tails=subs, tail_rel_gap_max=gap_max,
                         flagged=flagged)


def lemma3_compare(cfg: PipelineConfig,
                   step_scale: float = 1.0) -> CompareReport:
    """Run the comparison for cfg.f on [X, 2X] (exact lhs for integer f)."""
    X, h = cfg.X, cfg.h
    if cfg.f.integer_valued:
        series = build_series(cfg.f, X, cfg.delta, subtract_mean=False)
        lhs = compute_variance(series).variance
    else:
        vals = values_over(cfg.f, X, 2 * X + h + 1)
        lhs = compute_variance(
            sliding_sums(vals, h, subtract_mean=False)).variance
    poly = from_dense(X, values_over(cfg.f, X, 2 * X + 1))
    head, tail_max, tail_T, count, subs, gap_max, flagged = _dyadic_rhs(
        poly, X, cfg.delta, step_scale, cfg.tail_points, cfg.threads)
    rhs = head + tail_max
    if rhs <= 0.0:
        if lhs > 0.0:
            raise FlaggedInvariant("zero mean-square bound for nonzero variance")
        ratio = 0.0
    else:
        ratio = lhs / rhs
    return CompareReport(X=X, delta=cfg.delta, h=h, step_scale=step_scale,
                         lhs=lhs, rhs=rhs, ratio=ratio, head=head,
                         tail_max=tail_max, tail_T=tail_T, tail_count=count,
                         subsampled_tails=subs, tail_rel_gap_max=gap_max,
                         flagged=flagged)


@dataclass(frozen=True)
class ChainReport:
    X: int
    delta: float
    epsilon: float
    P: float
    Q: float
    H: float
    T0: float
    T: float
    nbins: int
    lhs_total: float
    small_t: float
    rough_ms: float | None
    rough_scale: float | None
    product_j: int | None
    product_ms: float | None
    product_term: float | None
    product_scale: float | None
    qsup: float | None
    qsup_scale: float | None
    boundary_lower_ms: float | None
    boundary_upper_ms: float | None
    boundary_scale: float | None
    assembled: float
    shape_statement: float
    shape_combined: float
    flagged: bool

    def report(self) -> dict:
        out = {"schema": 1}
        for k in ("X", "delta", "epsilon", "P", "Q", "H", "T0", "T", "nbins",
                  "lhs_total", "small_t", "rough_ms", "rough_scale",
                  "product_j", "product_ms", "product_term", "product_scale",
                  "qsup", "qsup_scale", "boundary_lower_ms",
                  "boundary_upper_ms", "boundary_scale", "assembled",
                  "shape_statement", "shape_combined", "flagged"):
            out[k] = getattr(self, k)
        return out


def lemma4_chain(cfg: PipelineConfig, T: float) -> ChainReport:
    """Measure every term of the decomposition bound for int_0^T |L|^2 dt.

    L is the Liouville polynomial on [X, 2X] (the extraction weights a_m
    are built from lambda, so this chain is lambda-specific by nature).
    For T <= T0 only the small-t regime exists and the sum-splitting terms
    are None.  Otherwise the [T0, T] piece is bounded by

        2 int|rough|^2 + 6 nbins^2 max_j int|Q_j F_j|^2
        + 6 int|b_lower|^2 + 6 int|b_upper|^2

    (triangle inequality constants made explicit), where max_j is located
    by an upper-bound proxy (sum 1/p per bin squared times the mean-value
    cap of F_j) and the top three candidates are measured.
    """
    X, delta, eps = cfg.X, cfg.delta, cfg.epsilon
    P, Q, H, T0 = cfg.P, cfg.Q, cfg.H, cfg.T0
    if not (0.0 < T <= X):
        raise ValidationError("chain requires 0 < T <= X")
    logX = math.log(X)
    scfg = SieveConfig(prime_window=(P, Q))
    blk = sieve_block((X, 2 * X + 1), scfg)
    L = from_dense(X, blk.lam.astype(np.float64))

    kw = dict(step_scale=1.0, max_points=cfg.t_budget, threads=cfg.threads)
    total = mean_square(L, 0.0, T, **kw)
    lhs_total = total.refined_value
    flagged = total.flagged and not total.subsampled

    shape_statement = ((T / X + 1.0) / logX ** (1.0 / 3.0 - eps)
                       + T / X ** (1.0 - delta / 2.0))
    shape_combined = (logX ** (-1.0 / 3.0 + eps) * (T / X + 1.0)
                      + logX ** 12.0 * (T / X ** (1.0 - delta / 3.0)
                                        + logX ** -18.0))

    if T <= T0:
        return ChainReport(X=X, delta=delta, epsilon=eps, P=P, Q=Q, H=H,
                           T0=T0, T=T, nbins=0, lhs_total=lhs_total,
                           small_t=lhs_total, rough_ms=None, rough_scale=None,
                           product_j=None, product_ms=None, product_term=None,
                           product_scale=None, qsup=None, qsup_scale=None,
                           boundary_lower_ms=None, boundary_upper_ms=None,
                           boundary_scale=None, assembled=lhs_total,
                           shape_statement=shape_statement,
                           shape_combined=shape_combined, flagged=flagged)

    small = mean_square(L, 0.0, T0, **kw)
    small_t = small.refined_value
    flagged = flagged or (small.flagged and not small.subsampled)

    rough_mask = blk.window_omega == 0
    nvals = np.arange(X, 2 * X + 1, dtype=np.int64)
    R = from_pairs(X, 2 * X, nvals[rough_mask],
                   blk.lam.astype(np.float64)[rough_mask])
    rms = mean_square(R, T0, T, **kw)
    rough_ms = rms.refined_value
    flagged = flagged or (rms.flagged and not rms.subsampled)
    rough_scale = (T / X + 1.0) * (math.log(P) / math.log(Q))

    j_lo = math.floor(H * math.log(P))
    j_hi = math.ceil(H * math.log(Q))
    nbins = j_hi - j_lo + 1
    m_min = max(1, _frange(X, H, j_hi)[0])
    m_max = _frange(X, H, j_lo)[1]
    mblk = sieve_block((m_min, m_max + 1), scfg)
    a_num = mblk.lam
    a_den = mblk.window_omega.astype(np.int64) + 1
    a_m = a_num.astype(np.float64) / a_den.astype(np.float64)
    marr = np.arange(m_min, m_max + 1, dtype=np.float64)
    w2 = (a_m / marr) ** 2
    W2 = np.concatenate(([0.0], np.cumsum(w2)))

    ps = primes_in(P, Q)
    bins: dict[int, list[int]] = {}
    for p in ps.tolist():
        bins.setdefault(math.floor(H * math.log(p)), []).append(p)

    # proxy u_j = (sum 1/p)^2 * (T + max m) * mass(F_j): an upper-bound
    # shape for int |Q_j F_j|^2, used only to rank candidate bins
    scored = []
    for j, bps in bins.items():
        lo, hi = _frange(X, H, j)
        lo, hi = max(1, lo, m_min), min(hi, m_max)
        if hi < lo:
            continue
        mass = float(W2[hi - m_min + 1] - W2[lo - m_min])
        sup_l1 = math.fsum(1.0 / p for p in bps)
        scored.append((sup_l1 * sup_l1 * (T + hi) * mass, j, bps, lo, hi))
    product_j = product_ms = product_term = product_scale = None
    qsup = qsup_scale = None
    if scored:
        scored.sort(key=lambda r: (-r[0], r[1]))
        best_val, best_j, best_row = -1.0, None, None
        for _, j, bps, lo, hi in scored[:3]:
            qpoly = DirichletPoly(n1=min(bps), n2=max(bps),
                                  n=np.array(bps, dtype=np.int64),
                                  a=np.full(len(bps), -1.0))
            fpoly = from_dense(lo, a_m[lo - m_min: hi - m_min + 1])
            pm = mean_square_product(qpoly, fpoly, T0, T, **kw)
            flagged = flagged or (pm.flagged and not pm.subsampled)
            if pm.refined_value > best_val:
                best_val, best_j, best_row = pm.refined_value, j, qpoly
        product_j, product_ms = best_j, best_val
        product_term = float(nbins) ** 2 * product_ms
        product_scale = logX ** -18.0 * (Q * T / X + 1.0)
        s = sampled_sup(best_row, T0, min(T, float(X)), threads=cfg.threads)
        qsup, qsup_scale = s.value, logX ** -9.0

    d = _boundary_d(X, H, ps.tolist(), a_num, a_den, m_min)
    b_lo = _poly_from_d(d, math.ceil(X * math.exp(-1.0 / H)), X - 1)
    b_up = _poly_from_d(d, 2 * X + 1, math.floor(2 * X * math.exp(1.0 / H)))
    blo_ms = mean_square(b_lo, T0, T, **kw)
    bup_ms = mean_square(b_up, T0, T, **kw)
    flagged = flagged or (blo_ms.flagged and not blo_ms.subsampled) \
        or (bup_ms.flagged and not bup_ms.subsampled)
    boundary_scale = (T / X + 1.0) / H

    assembled = (small_t + 2.0 * rough_ms
                 + 6.0 * (product_term or 0.0)
                 + 6.0 * (blo_ms.refined_value + bup_ms.refined_value))
    return ChainReport(X=X, delta=delta, epsilon=eps, P=P, Q=Q, H=H, T0=T0,
                       T=T, nbins=nbins, lhs_total=lhs_total, small_t=small_t,
                       rough_ms=rough_ms, rough_scale=rough_scale,
                       product_j=product_j, product_ms=product_ms,
                       product_term=product_term, product_scale=product_scale,
                       qsup=qsup, qsup_scale=qsup_scale,
                       boundary_lower_ms=blo_ms.refined_value,
                       boundary_upper_ms=bup_ms.refined_value,
                       boundary_scale=boundary_scale, assembled=assembled,
                       shape_statement=shape_statement,
                       shape_combined=shape_combined, flagged=flagged)


@dataclass(frozen=True)
class StudyRow:
    X: int
    delta: float
    h: int
    variance: float
    variance_scaled: float      # variance * (log X)^(1/3)
    threshold: float
    exceptional_fraction: float
    lhs_lemma3: float | None    # None above the poly size cap
    rhs_lemma3: float | None
    lemma3_ratio: float | None
    mvt_ratio_max: float | None
    seconds: float


@dataclass(frozen=True)
class ScalingStudy:
    rows: list[StudyRow]
    config: dict


def scaling_study(deltas: Sequence[float], X_list: Sequence[int],
                  f: MultiplicativeFunction | None = None, *,
                  subtract_mean: bool = False, max_poly_X: int = 20_000,
                  t_budget: int = 250_000, tail_points: int = 8001,
                  step_scale: float = 1.0, threads: int = 1) -> ScalingStudy:
    """One row per (X, delta): variance statistics always; the polynomial
    columns (comparison lhs/rhs, mean-value ratio at T in {X^{1-delta}, X})
    only for X <= max_poly_X, since dense t-grids over [0, X] are
    quadratic-cost at large X.  Rows are sorted by (X, delta); `seconds` is
    wall time and is excluded from the JSON form (kept in CSV).
    """
    if f is None:
        f = liouville()
    if not deltas or not X_list:
        raise ValidationError("deltas and X_list must be nonempty")
    rows = []
    for X in sorted(int(x) for x in X_list):
        for delta in sorted(float(dl) for dl in deltas):
            t_start = time.perf_counter()
            series = build_series(f, X, delta, subtract_mean=subtract_mean)
            var = compute_variance(series)
            lhs = rhs = ratio = mvt_max = None
            if X <= max_poly_X:
                vals = values_over(f, X, 2 * X + series.h + 1)
                cmp_rep = compare_from_values(
                    vals, X, delta, step_scale=step_scale,
                    tail_points=tail_points, threads=threads)
                if cmp_rep.flagged:
                    raise FlaggedInvariant(
                        f"comparison estimate flagged at X={X}, delta={delta}")
                lhs, rhs, ratio = cmp_rep.lhs, cmp_rep.rhs, cmp_rep.ratio
                poly = from_dense(X, vals[: X + 1])
                mvt_max = max(
                    mvt_ratio(poly, float(X) ** (1.0 - delta),
                              max_points=t_budget, threads=threads),
                    mvt_ratio(poly, float(X), max_points=t_budget,
                              threads=threads))
            rows.append(StudyRow(
                X=X, delta=delta, h=series.h, variance=var.variance,
                variance_scaled=var.variance * math.log(X) ** (1.0 / 3.0),
                threshold=var.threshold,
                exceptional_fraction=var.exceptional_fraction,
                lhs_lemma3=lhs, rhs_lemma3=rhs, lemma3_ratio=ratio,
                mvt_ratio_max=mvt_max,
                seconds=time.perf_counter() - t_start))
    config = {"f": f.name, "seed": f.seed, "subtract_mean": subtract_mean,
              "deltas": sorted(float(dl) for dl in deltas),
              "X_list": sorted(int(x) for x in X_list),
              "max_poly_X": int(max_poly_X), "t_budget": int(t_budget),
              "tail_points": int(tail_points), "step_scale": float(step_scale)}
    return ScalingStudy(rows=rows, config=config)


_ROW_FIELDS = ("X", "delta", "h", "variance", "variance_scaled", "threshold",
               "exceptional_fraction", "lhs_lemma3", "rhs_lemma3",
               "lemma3_ratio", "mvt_ratio_max", "seconds")


def study_json_dict(study: ScalingStudy) -> dict:
    """JSON form; wall-clock seconds are nulled so reruns are byte-identical."""
    rows = []
    for r in study.rows:
        row = {k: getattr(r, k) for k in _ROW_FIELDS}
        row["seconds"] = None
        rows.append(row)
    return {"schema": 1, "config": study.config, "rows": rows}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".17g")


def study_csv(study: ScalingStudy) -> str:
    lines = [",".join(_ROW_FIELDS)]
    for r in study.rows:
        lines.append(",".join(_fmt(getattr(r, k)) for k in _ROW_FIELDS))
    return "\n".join(lines) + "\n"
