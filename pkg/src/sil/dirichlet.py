"""Dirichlet polynomials on the 1-line: evaluation, mean squares, profiles.

A polynomial with real coefficients a_n supported on [N1, N2] is evaluated as

    F(1 + it) = sum_n a_n n^(-1) (cos(t log n) - i sin(t log n)).

mean_square estimates integral_{T1}^{T2} |F(1+it)|^2 dt with the trapezoid
rule at step dt = 0.1 / log(N2) plus a refinement at dt/2; the relative gap
between the two is the built-in quadrature check (estimates with rel_gap
above 1% are flagged).  Two algebraically identical summation routes exist:

  grid      evaluate F on the fine grid by a rotation recurrence
            (cur *= exp(-i dt log n) per step, restarted every chunk) and
            trapezoid-sum |F|^2; cost ~ #points * #terms.

  pairwise  expand |F(1+it)|^2 = sum_{m,n} w_m w_n e^{it(log n - log m)} and
            sum the trapezoid weights in closed form per pair via the
            Dirichlet kernel sum_{k=0}^{M} e^{ik phi} =
            e^{iM phi/2} sin((M+1) phi/2) / sin(phi/2);
            cost ~ #terms^2 / 2, independent of the grid size, which wins
            for small supports integrated over long t-ranges.

The route is chosen by an operation-count model that depends only on sizes,
so identical requests always take identical paths.  When the policy grid
exceeds the caller's max_points the grid is coarsened to fit and the result
is marked subsampled (a documented heuristic, used for dyadic tail probes);
without max_points an oversized request raises CapacityError.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CapacityError, ValidationError
from .parallel import fixed_chunks, ordered_map
from .sieve import primes_in, sieve_block

_T_CHUNK = 8192          # rotation recurrence restart interval (fixed)
_PAIR_BLOCK = 256        # pairwise row-block height (fixed)
_GRID_OPS_BUDGET = 2.5e10
_PAIR_OPS_BUDGET = 5.0e8
_REL_GAP_ACCEPT = 0.01


@dataclass(eq=False)
class DirichletPoly:
    """Coefficients on the integer interval [n1, n2]; zeros stored sparsely.

    n holds the ascending support points with nonzero coefficients, a the
    matching values, |a_n| <= 1.  Instances are immutable by convention.
    """

    n1: int
    n2: int
    n: np.ndarray
    a: np.ndarray
    _logn: np.ndarray | None = field(default=None, repr=False)
    _w: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.n1 < 1 or self.n2 < self.n1 - 1:
            raise ValidationError(f"bad support [{self.n1}, {self.n2}]")
        if len(self.n) != len(self.a):
            raise ValidationError("support and coefficient lengths differ")
        if len(self.n):
            if int(self.n[0]) < self.n1 or int(self.n[-1]) > self.n2:
                raise ValidationError("support points outside [n1, n2]")
            if np.any(np.diff(self.n) <= 0):
                raise ValidationError("support points must be strictly ascending")
            if float(np.max(np.abs(self.a))) > 1.0 + 1e-12:
                raise ValidationError("coefficients must satisfy |a_n| <= 1")

    @property
    def nnz(self) -> int:
        return len(self.n)

    def logn(self) -> np.ndarray:
        if self._logn is None:
            self._logn = np.log(self.n.astype(np.float64))
        return self._logn

    def weights(self) -> np.ndarray:
        """a_n / n, the coefficients of the oscillating sum."""
        if self._w is None:
            self._w = self.a / self.n.astype(np.float64)
        return self._w

    def coeff_l2_over_n2(self) -> float:
        """sum a_n^2 / n^2, the mean value theorem mass."""
        return math.fsum(self.weights() * self.weights())


def from_dense(n1: int, coeffs: np.ndarray) -> DirichletPoly:
    """Poly with coeffs[i] attached to n1 + i; exact zeros are dropped."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    idx = np.flatnonzero(coeffs != 0.0)
    return DirichletPoly(n1=n1, n2=n1 + len(coeffs) - 1,
                         n=(idx + n1).astype(np.int64), a=coeffs[idx].copy())


def from_pairs(n1: int, n2: int, n: np.ndarray, a: np.ndarray) -> DirichletPoly:
    n = np.asarray(n, dtype=np.int64)
    a = np.asarray(a, dtype=np.float64)
    keep = a != 0.0
    return DirichletPoly(n1=n1, n2=n2, n=n[keep].copy(), a=a[keep].copy())


def zero_poly(n1: int = 1, n2: int = 0) -> DirichletPoly:
    return DirichletPoly(n1=n1, n2=max(n2, n1 - 1),
                         n=np.empty(0, dtype=np.int64),
                         a=np.empty(0, dtype=np.float64))


def liouville_poly(X: int) -> DirichletPoly:
    """lambda(n) on [X, 2X] (inclusive), from the segmented sieve."""
    X = int(X)
    block = sieve_block((X, 2 * X + 1))
    return from_dense(X, block.lam.astype(np.float64))


def prime_poly(P: float, Q: float) -> DirichletPoly:
    """Coefficient 1 on every prime in [P, Q], zero elsewhere (sparse)."""
    if not (2 <= P <= Q):
        raise ValidationError("prime_poly requires 2 <= P <= Q")
    ps = primes_in(P, Q)
    n1 = max(2, math.ceil(P))
    n2 = max(n1 - 1, math.floor(Q))
    return DirichletPoly(n1=n1, n2=n2, n=ps, a=np.ones(len(ps)))


def eval_at(poly: DirichletPoly, t: float) -> complex:
    """F(1+it) by fixed-order compensated summation (exact conjugate symmetry:
    cos is even and sin odd, so eval_at(-t) is the same arithmetic conjugated)."""
    if not math.isfinite(t):
        raise ValidationError("t must be finite")
    if poly.nnz == 0:
        return 0.0 + 0.0j
    ang = t * poly.logn()
    w = poly.weights()
    return complex(math.fsum(w * np.cos(ang)), -math.fsum(w * np.sin(ang)))


# contract alias: the operation is named eval; eval_at keeps the builtin
# usable inside this module
eval = eval_at


def eval_grid(poly: DirichletPoly, t0: float, dt: float, count: int,
              threads: int = 1) -> np.ndarray:
    """F(1 + i(t0 + k dt)) for k = 0..count-1 via the rotation recurrence.

    The recurrence restarts from an exact phase every _T_CHUNK steps, which
    bounds drift and makes the chunk partition (and therefore every float)
    independent of the thread count.
    """
    if count <= 0:
        return np.empty(0, dtype=np.complex128)
    if poly.nnz == 0:
        return np.zeros(count, dtype=np.complex128)
    logn = poly.logn()
    w = poly.weights()
    out = np.empty(count, dtype=np.complex128)

    def fill(chunk: tuple[int, int]) -> None:
        k0, k1 = chunk
        cur = w * np.exp(logn * (-1j * (t0 + k0 * dt)))
        step = np.exp(logn * (-1j * dt))
        for k in range(k0, k1):
            out[k] = cur.sum()
            cur *= step
        return None

    ordered_map(fill, fixed_chunks(count, _T_CHUNK), threads=threads)
    return out


@dataclass(frozen=True)
class MeanSquareEstimate:
    t1: float
    t2: float
    grid_step: float       # coarse step dt; refinement ran at dt/2
    value: float
    refined_value: float
    rel_gap: float
    method: str            # "grid" | "pairwise"
    points: int            # fine-grid point count (2M + 1)
    subsampled: bool
    flagged: bool          # rel_gap above the 1% acceptance bound

    def best(self) -> float:
        return self.refined_value


def _trapezoid_pair(I2: np.ndarray, dt: float) -> tuple[float, float]:
    """(coarse, fine) trapezoid totals from fine-grid samples I2 at step dt/2."""
    fine = (dt / 2.0) * (math.fsum(I2) - 0.5 * (I2[0] + I2[-1]))
    coarse_samples = I2[::2]
    coarse = dt * (math.fsum(coarse_samples)
                   - 0.5 * (coarse_samples[0] + coarse_samples[-1]))
    return coarse, fine


def _pairwise_trapezoid(poly: DirichletPoly, t1: float, dt: float, m_coarse: int,
                        threads: int = 1) -> tuple[float, float]:
    """Closed-form trapezoid totals (coarse step dt with m_coarse intervals,
    fine step dt/2 with 2*m_coarse intervals) for integral |F(1+it)|^2.

    Per ordered pair (i < j) with phase gap theta = log n_j - log n_i the
    trapezoid weight sum is geometric; with phi = dt * theta,

        sum_{k=0}^{M} c_k e^{ik phi}
            = e^{iM phi/2} sin((M+1) phi/2) / sin(phi/2) - (1 + e^{iM phi})/2

    (c_0 = c_M = 1/2, else 1).  The fine grid reuses e^{iM phi/2}: with half
    step the midpoint rotation of the doubled interval count is the same.
    """
    logn = poly.logn()
    w = poly.weights()
    nnz = poly.nnz
    M = m_coarse
    diag = math.fsum(w * w)
    span = dt * M

    def block_sums(rows: tuple[int, int]) -> tuple[float, float]:
        r0, r1 = rows
        li = logn[r0:r1, None]
        wi = w[r0:r1, None]
        lj = logn[None, r0:]
        wj = w[None, r0:]
        theta = lj - li
        wprod = wi * wj
        # zero out j <= i so only strict upper-triangle pairs count
        cols = np.arange(r0, nnz)[None, :]
        rows_idx = np.arange(r0, r1)[:, None]
        wprod = np.where(cols > rows_idx, wprod, 0.0)
        phi_half = (0.5 * dt) * theta           # = phi_coarse / 2
        sin_c = np.sin(phi_half)                # sin(phi_c / 2)
        sin_c1 = np.sin((M + 1) * phi_half)     # sin((M+1) phi_c / 2)
        mid_ang = M * phi_half                  # M phi_c / 2
        mid_re = np.cos(mid_ang)
        mid_im = np.sin(mid_ang)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio_c = np.where(sin_c != 0.0, sin_c1 / np.where(sin_c != 0.0, sin_c, 1.0), M + 1.0)
        # e^{iM phi_c} = (e^{iM phi_c/2})^2
        sq_re = mid_re * mid_re - mid_im * mid_im
        sq_im = 2.0 * mid_re * mid_im
        kern_c_re = ratio_c * mid_re - 0.5 - 0.5 * sq_re
        kern_c_im = ratio_c * mid_im - 0.5 * sq_im
        # fine grid: step dt/2, 2M intervals; phi_f/2 = phi_c/4,
        # (2M+1) phi_f/2 and e^{i 2M phi_f/2} = e^{iM phi_c/2} (reused above)
        phi_quarter = 0.5 * phi_half
        sin_f = np.sin(phi_quarter)
        sin_f1 = np.sin((2 * M + 1) * phi_quarter)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio_f = np.where(sin_f != 0.0, sin_f1 / np.where(sin_f != 0.0, sin_f, 1.0), 2 * M + 1.0)
        kern_f_re = ratio_f * mid_re - 0.5 - 0.5 * sq_re
        kern_f_im = ratio_f * mid_im - 0.5 * sq_im
        if t1 != 0.0:
            base_ang = t1 * theta
            c0 = np.cos(base_ang)
            s0 = np.sin(base_ang)
            re_c = c0 * kern_c_re - s0 * kern_c_im
            re_f = c0 * kern_f_re - s0 * kern_f_im
        else:
            re_c = kern_c_re
            re_f = kern_f_re
        part_c = float(np.sum(wprod * re_c))
        part_f = float(np.sum(wprod * re_f))
        return part_c, part_f

    parts = ordered_map(block_sums, fixed_chunks(nnz, _PAIR_BLOCK), threads=threads)
    off_c = math.fsum(p[0] for p in parts)
    off_f = math.fsum(p[1] for p in parts)
    coarse = span * diag + 2.0 * dt * off_c
    fine = span * diag + 2.0 * (dt / 2.0) * off_f
    return coarse, fine


def mean_square(poly: DirichletPoly, t1: float, t2: float, *,
                step_scale: float = 1.0, max_points: int | None = None,
                threads: int = 1,
                grid_ops_budget: float = _GRID_OPS_BUDGET,
                pair_ops_budget: float = _PAIR_OPS_BUDGET) -> MeanSquareEstimate:
    """Trapezoid estimate of integral_{t1}^{t2} |F(1+it)|^2 dt.

    Coarse step dt = step_scale * 0.1 / log(N2), refinement at dt/2, both
    recorded; pass step_scale < 1 to probe grid stability.
    """
    if not (0.0 <= t1 < t2):
        raise ValidationError("mean_square requires 0 <= T1 < T2")
    span = t2 - t1
    if poly.nnz == 0:
        return MeanSquareEstimate(t1, t2, span, 0.0, 0.0, 0.0, "grid", 1,
                                  False, False)
    policy_dt = step_scale * 0.1 / math.log(max(poly.n2, 2))
    M = max(1, math.ceil(span / policy_dt))
    subsampled = False
    if max_points is not None and 2 * M + 1 > max_points:
        M = max(1, (max_points - 1) // 2)
        subsampled = True
    dt = span / M
    fine_points = 2 * M + 1
    nnz = poly.nnz
    grid_cost = float(fine_points) * nnz
    pair_cost = 0.5 * nnz * (nnz - 1)
    # measured per-op costs: pairwise ops are ~60x a recurrence element visit
    use_pairwise = pair_cost * 60.0 < grid_cost and pair_cost <= pair_ops_budget
    if not use_pairwise and grid_cost > grid_ops_budget:
        if pair_cost <= pair_ops_budget:
            use_pairwise = True
        else:
            raise CapacityError(
                f"mean square needs {fine_points} grid points x {nnz} terms "
                f"(~{grid_cost:.2e} ops); shorten the t-range, pass "
                "max_points to subsample, or raise the budget")
    if use_pairwise:
        coarse, fine = _pairwise_trapezoid(poly, t1, dt, M, threads=threads)
        method = "pairwise"
    else:
        I2 = eval_grid(poly, t1, dt / 2.0, fine_points, threads=threads)
        I2 = (I2.real * I2.real + I2.imag * I2.imag)
        coarse, fine = _trapezoid_pair(I2, dt)
        method = "grid"
    coarse = float(max(coarse, 0.0))
    fine = float(max(fine, 0.0))
    rel_gap = abs(coarse - fine) / max(fine, 1e-300)
    return MeanSquareEstimate(t1=t1, t2=t2, grid_step=dt, value=coarse,
                              refined_value=fine, rel_gap=rel_gap,
                              method=method, points=fine_points,
                              subsampled=subsampled,
                              flagged=bool(rel_gap > _REL_GAP_ACCEPT))


def mean_square_product(pa: DirichletPoly, pb: DirichletPoly, t1: float,
                        t2: float, *, step_scale: float = 1.0,
                        max_points: int | None = None, threads: int = 1,
                        grid_ops_budget: float = _GRID_OPS_BUDGET) -> MeanSquareEstimate:
    """Trapezoid estimate of integral |A(1+it) B(1+it)|^2 dt (grid route only;
    the product of two polynomials has no two-term closed pairwise form)."""
    if not (0.0 <= t1 < t2):
        raise ValidationError("mean_square requires 0 <= T1 < T2")
    span = t2 - t1
    if pa.nnz == 0 or pb.nnz == 0:
        return MeanSquareEstimate(t1, t2, span, 0.0, 0.0, 0.0, "grid", 1,
                                  False, False)
    n2 = max(pa.n2, 2) * max(pb.n2, 2)
    policy_dt = step_scale * 0.1 / math.log(n2)
    M = max(1, math.ceil(span / policy_dt))
    subsampled = False
    if max_points is not None and 2 * M + 1 > max_points:
        M = max(1, (max_points - 1) // 2)
        subsampled = True
    dt = span / M
    fine_points = 2 * M + 1
    cost = float(fine_points) * (pa.nnz + pb.nnz)
    if cost > grid_ops_budget:
        raise CapacityError(
            f"product mean square needs ~{cost:.2e} ops; pass max_points")
    A = eval_grid(pa, t1, dt / 2.0, fine_points, threads=threads)
    B = eval_grid(pb, t1, dt / 2.0, fine_points, threads=threads)
    AB = A * B
    I2 = AB.real * AB.real + AB.imag * AB.imag
    coarse, fine = _trapezoid_pair(I2, dt)
    coarse, fine = float(max(coarse, 0.0)), float(max(fine, 0.0))
    rel_gap = abs(coarse - fine) / max(fine, 1e-300)
    return MeanSquareEstimate(t1=t1, t2=t2, grid_step=dt, value=coarse,
                              refined_value=fine, rel_gap=rel_gap,
                              method="grid", points=fine_points,
                              subsampled=subsampled,
                              flagged=bool(rel_gap > _REL_GAP_ACCEPT))


def mvt_ratio(poly: DirichletPoly, T: float, **ms_kwargs) -> float:
    """2 * mean_square([0, T]) / ((T + N2) sum a_n^2 / n^2).

    The factor 2 converts [0, T] to [-T, T] via conjugate symmetry of real
    coefficients.  Callers assert the ratio is O(1); it is the measured
    constant of the mean value theorem for Dirichlet polynomials.
    """
    if T <= 0:
        raise ValidationError("mvt_ratio requires T > 0")
    if poly.nnz == 0:
        return 0.0
    ms = mean_square(poly, 0.0, T, **ms_kwargs)
    mass = poly.coeff_l2_over_n2()
    return float(2.0 * ms.refined_value / ((T + poly.n2) * mass))


@dataclass(frozen=True)
class ProfileRow:
    t: float
    abs_value: float
    bound_ratio: float


def lemma2_profile(P: float, Q: float, X: int,
                      t_samples: Sequence[float]) -> list[ProfileRow]:
    """|P(1+it)| against the scale log X / (1 + |t|) + (log X)^-2.

    P(1+it) sums 1/p^(1+it) over window primes.  The comparison exponent is
    fixed at 2 so ratios are comparable across X; the ratio is reported, not
    asserted (no numeric constant exists to assert against).
    """
    X = int(X)
    if X < 3:
        raise ValidationError("profile requires X >= 3")
    poly = prime_poly(P, Q)
    logX = math.log(X)
    rows = []
    for t in t_samples:
        t = float(t)
        if not 0.0 <= abs(t) <= X:
            raise ValidationError(f"sample t = {t} outside [0, X]")
        ab = abs(eval_at(poly, t))
        denom = logX / (1.0 + abs(t)) + logX ** -2.0
        rows.append(ProfileRow(t=t, abs_value=ab, bound_ratio=ab / denom))
    return rows


@dataclass(frozen=True)
class SampledSup:
    value: float
    t_at: float
    grid_step: float
    points: int


def sampled_sup(poly: DirichletPoly, t1: float, t2: float,
                threads: int = 1) -> SampledSup:
    """max |F(1+it)| over the policy grid on [t1, t2]."""
    if t2 < t1:
        raise ValidationError("empty t-interval")
    dt = 0.1 / math.log(max(poly.n2, 2))
    count = max(2, math.ceil((t2 - t1) / dt) + 1)
    vals = np.abs(eval_grid(poly, t1, (t2 - t1) / (count - 1), count,
                            threads=threads))
    k = int(np.argmax(vals))
    return SampledSup(value=float(vals[k]),
                      t_at=t1 + k * (t2 - t1) / (count - 1),
                      grid_step=(t2 - t1) / (count - 1), points=count)


def lemma1_profile(X: int, A: float, threads: int = 1) -> SampledSup:
    """Sampled sup of |sum_{X <= n <= 2X} lambda(n) n^{-1-it}| over
    0 <= t <= (log X)^A; decays in X because lambda averages to o(1)."""
    X = int(X)
    if X < 100:
        raise ValidationError("small-t sup profile requires X >= 100")
    poly = liouville_poly(X)
    T = math.log(X) ** A
    return sampled_sup(poly, 0.0, T, threads=threads)
