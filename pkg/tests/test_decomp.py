import math
from fractions import Fraction

import numpy as np
import pytest

import oracles
from sil import (ValidationError, dyadic_split, eval_at, qjh_sup_profile,
                 ramare_decompose, reconstruct_main)
from sil.decomp import _frange

FROZEN_RESIDUAL_100 = Fraction(-898920202216277611736143,
                               159538811078583910445472000)


def rel_gap(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def test_identity_holds_by_computation():
    for X, P, Q, t in ((100, 2.0, 50.0, 0.0), (500, 5.0, 80.0, 1.0),
                       (2000, 11.0, 200.0, 17.3)):
        dec = ramare_decompose(X, P, Q, t)
        assert rel_gap(dec.lhs, dec.main + dec.rough + dec.residual) < 1e-12


def test_residual_frozen_instance():
    dec = ramare_decompose(100, 2.0, 50.0, 0.0)
    oracle = oracles.residual_fraction(100, 2.0, 50.0)
    assert oracle == FROZEN_RESIDUAL_100
    assert dec.residual.real == pytest.approx(float(oracle), rel=1e-13)
    assert dec.residual.imag == 0.0
    assert dec.residual_support_count == 40


def test_residual_support_is_the_window_square_set():
    X, P, Q = 300, 3.0, 60.0
    dec = ramare_decompose(X, P, Q, 0.0)
    flagged = {n for n in range(X, 2 * X + 1) if oracles.window_square(n, P, Q)}
    assert set(dec.support_n.tolist()) == flagged
    assert dec.residual_support_count == len(flagged)
    # per-n deficit audit: s / (w (w + 1)) against the exact rational form
    for n, s, w in zip(dec.support_n.tolist(), dec.support_s.tolist(),
                       dec.support_w.tolist()):
        assert oracles.weight_deficit(n, P, Q) == Fraction(int(s), int(w) * (int(w) + 1))


def test_components_match_brute_enumeration():
    for X, P, Q, t in ((60, 2.0, 11.0, 0.0), (120, 3.0, 30.0, 2.5),
                       (250, 7.0, 100.0, 31.4)):
        dec = ramare_decompose(X, P, Q, t)
        brute = oracles.ramare_parts(X, P, Q, t)
        for name in ("lhs", "main", "rough", "residual"):
            assert rel_gap(getattr(dec, name), brute[name]) < 1e-10, (name, X)


def test_empty_window_collapses_to_rough():
    dec = ramare_decompose(50, 24.0, 28.0, 0.0)  # no primes in [24, 28]
    assert dec.main == 0 and dec.residual == 0
    assert dec.rough == dec.lhs
    assert dec.residual_support_count == 0


def test_report_shape():
    rep = ramare_decompose(100, 2.0, 50.0, 1.5).report()
    assert set(rep) >= {"X", "P", "Q", "t", "lhs", "main", "rough",
                        "residual", "residual_support_count"}
    assert rep["schema"] == 1
    # complex values are emitted as [re, im] pairs
    assert max(abs(c) for c in rep["identity_gap"]) < 1e-14
    assert rep["lhs"][0] == ramare_decompose(100, 2.0, 50.0, 1.5).lhs.real


def test_validation():
    with pytest.raises(ValidationError):
        ramare_decompose(100, 50.0, 2.0, 0.0)
    with pytest.raises(ValidationError):
        ramare_decompose(100, 2.0, 500.0, 0.0)  # Q > 2X
    with pytest.raises(ValidationError):
        dyadic_split(100, 10.0, 20.0, 0.5)  # H < 1


@pytest.fixture(scope="module")
def split_1e4():
    return dyadic_split(10 ** 4, 10.0, 100.0, 20.0)


def test_reconstruction_fixed_instance(split_1e4):
    for t in (0.0, 1.0, 17.3, 1000.0):
        main = ramare_decompose(10 ** 4, 10.0, 100.0, t).main
        got = reconstruct_main(split_1e4, t)
        tol = 1e-10 if t == 0.0 else 1e-9
        assert rel_gap(got, main) < tol, t


def test_boundary_coefficients_bounded_and_supported(split_1e4):
    sp = split_1e4
    X, H = sp.X, sp.H
    low_lo = math.ceil(X * math.exp(-1.0 / H))
    up_hi = math.floor(2 * X * math.exp(1.0 / H))
    assert sp.d_exact
    for n, val in sp.d_exact.items():
        assert abs(val) <= 1
        assert (low_lo <= n < X) or (2 * X < n <= up_hi)
    assert max(abs(v) for v in sp.d_exact.values()) == 1  # attained here
    assert sp.boundary_lower.nnz == 120
    assert sp.boundary_upper.nnz == 286


def test_boundary_d_matches_first_principles(split_1e4):
    """Recompute every d_n from the definition: a window prime p sits in
    bin j = floor(H log p); the bin's m-range overshoots [X/p, 2X/p], and
    each overshoot m contributes lambda(p) * lambda(m)/(omega_win(m)+1)
    to the product integer n = mp."""
    sp = split_1e4
    X, P, Q, H = sp.X, sp.P, sp.Q, sp.H
    d = {}
    for p in oracles.window_primes(P, Q):
        j = math.floor(H * math.log(p))
        lo, hi = _frange(X, H, j)
        for m in range(max(1, lo), hi + 1):
            n = m * p
            if X <= n <= 2 * X:
                continue
            w = Fraction(-oracles.lam(m),
                         oracles.window_omega(m, P, Q) + 1)
            d[n] = d.get(n, Fraction(0)) + w
    d = {n: v for n, v in d.items() if v}
    assert d == sp.d_exact


def test_bins_partition_the_window(split_1e4):
    sp = split_1e4
    seen = []
    for j, qpoly, fpoly in sp.factors:
        assert sp.j_lo <= j <= sp.j_hi
        for p in qpoly.n.tolist():
            assert math.floor(sp.H * math.log(p)) == j
            seen.append(p)
        lo, hi = _frange(sp.X, sp.H, j)
        if fpoly.nnz:
            assert lo <= int(fpoly.n[0]) and int(fpoly.n[-1]) <= hi
    assert sorted(seen) == oracles.window_primes(sp.P, sp.Q)
    assert sum(1 for _, q, _ in sp.factors if q.nnz) == 20


def test_degenerate_single_bin_no_boundary():
    sp = dyadic_split(50, 7.0, 7.0, 1000.0)
    nonempty = [(j, q, f) for j, q, f in sp.factors if q.nnz]
    assert len(nonempty) == 1
    assert sp.boundary_lower.nnz == 0 and sp.boundary_upper.nnz == 0
    main = ramare_decompose(50, 7.0, 7.0, 0.0).main
    assert rel_gap(reconstruct_main(sp, 0.0), main) < 1e-14


def test_qjh_profile(split_1e4):
    rows = qjh_sup_profile(split_1e4, 10 ** 4, 0.0, 50.0)
    by_j = {r.j: r for r in rows}
    for j, qpoly, _ in split_1e4.factors:
        row = by_j[j]
        assert row.prime_count == qpoly.nnz
        if qpoly.nnz == 0:
            assert row.sup == 0.0
        else:
            # grid includes t = 0 where the 1/p terms align
            peak = float(np.sum(1.0 / qpoly.n))
            assert row.sup == pytest.approx(peak, rel=1e-12)
            if qpoly.nnz >= 2:  # single-prime bins are constant in t
                assert row.t_at == 0.0
    with pytest.raises(ValidationError):
        qjh_sup_profile(split_1e4, 10 ** 4, 5.0, 5.0)
    with pytest.raises(ValidationError):
        qjh_sup_profile(split_1e4, 10 ** 4, 0.0, 2 * 10 ** 4)
