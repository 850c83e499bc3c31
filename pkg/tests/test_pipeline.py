import json
import math

import numpy as np
import pytest

from sil import (PipelineConfig, ValidationError, build_series, compute_variance,
                 constant_one, lemma3_compare, lemma4_chain, liouville,
                 random_pm1, scaling_study, study_csv, study_json_dict)
from sil.pipeline import compare_from_values


def test_config_defaults_and_caps():
    cfg = PipelineConfig(X=10 ** 4, delta=0.5, P=10.0, Q=100.0)
    logX = math.log(10 ** 4)
    assert cfg.H == pytest.approx(logX ** 5)
    # (log X)^10 dwarfs X here, so T0 falls back to X^(1-delta)/4
    assert cfg.T0 == pytest.approx(math.sqrt(10 ** 4) / 4)
    assert cfg.h == 100
    assert cfg.f.name == "liouville"


def test_config_default_window_refusal():
    with pytest.raises(ValidationError, match="pass explicit P and Q"):
        PipelineConfig(X=10 ** 4, delta=0.5)
    # forcing the window works
    cfg = PipelineConfig(X=10 ** 4, delta=0.5, P=10.0, Q=100.0)
    assert (cfg.P, cfg.Q) == (10.0, 100.0)


def test_config_validation_messages():
    with pytest.raises(ValidationError, match=r"delta must be in \(0,1\)"):
        PipelineConfig(X=1000, delta=1.5, P=3.0, Q=9.0)
    with pytest.raises(ValidationError, match="both P and Q"):
        PipelineConfig(X=1000, delta=0.5, P=10.0)
    with pytest.raises(ValidationError):
        PipelineConfig(X=1000, delta=0.5, P=10.0, Q=3.0)


def test_compare_zero_surrogate():
    X, delta = 500, 0.5
    h = int(X ** delta)
    rep = compare_from_values(np.zeros(X + h + 1), X, delta)
    assert rep.lhs == rep.rhs == rep.ratio == 0.0
    assert not rep.flagged


def test_compare_frozen_ratio_and_exact_lhs():
    cfg = PipelineConfig(X=10 ** 4, delta=0.5, P=10.0, Q=100.0)
    rep = lemma3_compare(cfg)
    var = compute_variance(build_series(liouville(), 10 ** 4, 0.5)).variance
    assert rep.lhs == pytest.approx(var, rel=1e-15)
    assert rep.ratio == pytest.approx(0.867059, rel=1e-4)
    assert rep.rhs == rep.head + rep.tail_max
    assert rep.tail_count > 0 and rep.subsampled_tails <= rep.tail_count
    assert not rep.flagged
    refined = lemma3_compare(cfg, step_scale=0.5)
    assert abs(refined.ratio - rep.ratio) <= 0.05 * rep.ratio


def test_compare_values_length_check():
    with pytest.raises(ValidationError):
        compare_from_values(np.zeros(100), 500, 0.5)


def test_compare_report_dict():
    cfg = PipelineConfig(X=2000, delta=0.5, P=5.0, Q=50.0)
    d = lemma3_compare(cfg).report()
    assert d["schema"] == 1
    assert set(d) >= {"X", "delta", "h", "lhs", "rhs", "ratio", "head",
                      "tail_max", "tail_T", "subsampled_tails", "flagged"}
    json.dumps(d)  # everything JSON-clean


def test_chain_small_t_only():
    cfg = PipelineConfig(X=10 ** 4, delta=0.5, P=10.0, Q=100.0)
    ch = lemma4_chain(cfg, cfg.T0 / 2)
    assert ch.product_ms is None and ch.product_j is None
    assert ch.boundary_lower_ms is None
    assert ch.assembled == ch.lhs_total == ch.small_t
    assert not ch.flagged


def test_chain_full_terms_frozen_instance():
    cfg = PipelineConfig(X=10 ** 4, delta=0.5, P=10.0, Q=100.0, H=20.0)
    ch = lemma4_chain(cfg, 100.0)
    assert ch.lhs_total == pytest.approx(0.00449430861614853, rel=1e-9)
    assert ch.nbins == 48 and ch.product_j == 56
    assert ch.lhs_total <= ch.assembled
    assert ch.small_t + ch.rough_ms <= ch.assembled
    # measured scales: calibrated constants with wide headroom
    assert ch.rough_ms <= 0.1 * ch.rough_scale
    assert max(ch.boundary_lower_ms, ch.boundary_upper_ms) <= 0.1 * ch.boundary_scale
    assert ch.lhs_total <= ch.shape_combined
    assert not ch.flagged
    d = ch.report()
    assert d["schema"] == 1
    json.dumps(d)


def test_chain_validation():
    cfg = PipelineConfig(X=1000, delta=0.5, P=5.0, Q=50.0)
    with pytest.raises(ValidationError):
        lemma4_chain(cfg, 0.0)
    with pytest.raises(ValidationError):
        lemma4_chain(cfg, 2000.0)


def test_study_rows_and_columns():
    study = scaling_study([0.5], [2000, 1000], f=liouville())
    assert [r.X for r in study.rows] == [1000, 2000]  # sorted
    for row in study.rows:
        direct = compute_variance(build_series(liouville(), row.X, 0.5))
        assert row.variance == pytest.approx(direct.variance, rel=1e-15)
        assert row.variance_scaled == pytest.approx(
            row.variance * math.log(row.X) ** (1 / 3), rel=1e-15)
        assert row.lemma3_ratio is not None and row.mvt_ratio_max is not None
        assert row.seconds >= 0.0
    assert study.config["f"] == "liouville"


def test_study_poly_columns_respect_cap():
    study = scaling_study([0.5], [1000], f=liouville(), max_poly_X=500)
    row = study.rows[0]
    assert row.lhs_lemma3 is None and row.mvt_ratio_max is None
    assert row.variance > 0


def test_study_constant_one_mean_subtracted():
    study = scaling_study([0.5], [500, 1500], f=constant_one(),
                          subtract_mean=True, max_poly_X=0)
    for row in study.rows:
        assert row.variance == pytest.approx(row.X ** -2, rel=1e-9)


def test_study_seed_and_json_stability():
    f = random_pm1(11)
    s1 = scaling_study([0.5], [1000], f=f, max_poly_X=0)
    s2 = scaling_study([0.5], [1000], f=f, max_poly_X=0)
    assert s1.config["seed"] == 11
    j1 = json.dumps(study_json_dict(s1), sort_keys=True)
    j2 = json.dumps(study_json_dict(s2), sort_keys=True)
    assert j1 == j2  # seconds are nulled in JSON
    assert '"seconds": null' in json.dumps(study_json_dict(s1))


def test_study_csv_format():
    study = scaling_study([0.5], [1000], f=liouville())
    text = study_csv(study)
    header, row = text.strip().split("\n")
    assert header == ("X,delta,h,variance,variance_scaled,threshold,"
                      "exceptional_fraction,lhs_lemma3,rhs_lemma3,"
                      "lemma3_ratio,mvt_ratio_max,seconds")
    cells = row.split(",")
    assert cells[0] == "1000"
    # floats carry 17 significant digits and round-trip exactly
    assert cells[3] == "%.17g" % study.rows[0].variance
    assert float(cells[3]) == study.rows[0].variance


def test_study_threads_do_not_change_numbers():
    a = scaling_study([0.5], [1000], f=liouville(), threads=1)
    b = scaling_study([0.5], [1000], f=liouville(), threads=4)
    ja = json.dumps(study_json_dict(a), sort_keys=True)
    jb = json.dumps(study_json_dict(b), sort_keys=True)
    assert ja == jb
