import math

import numpy as np
import pytest

from sarlab.channel import CorrelationModel, ScenarioParams
from sarlab.errors import SingularMatrix
from sarlab.lep import lep_combine
from sarlab.oracle import (
    MeasureRequest,
    channel_sqrt,
    complex_normal,
    covariance_checks,
    forge_attack,
    mc_gaussian_measures,
    mc_quantized_cond_entropy,
    sample_scenario,
)
from sarlab.sar import QuantizerSpec, acbca_sar_quantized, quantized_entropy, quantizer_for

DEFAULT = ScenarioParams()


def test_determinism_and_sharding():
    a = sample_scenario(DEFAULT, 2, 300_000, seed=9)
    b = sample_scenario(DEFAULT, 2, 300_000, seed=9, workers=3)
    for name in a.columns:
        assert np.array_equal(a.columns[name], b.columns[name])
    assert np.array_equal(a.columns["x1"][:10], sample_scenario(DEFAULT, 2, 10, seed=9).columns["x1"])
    c = sample_scenario(DEFAULT, 2, 1000, seed=10)
    assert not np.array_equal(a.columns["x1"][:1000], c.columns["x1"])


def test_complex_normal_moments():
    w = complex_normal(np.random.default_rng(0), 1_000_000)
    assert np.mean(np.abs(w) ** 2) == pytest.approx(1.0, abs=5e-3)
    assert abs(np.mean(w * w)) < 5e-3
    assert abs(np.mean(w.real ** 2) - 0.5) < 3e-3


def test_independent_eve_sample_correlation():
    n = 200_000
    s = sample_scenario(ScenarioParams(alpha_A=0.0, alpha_B=0.0), 1, n, seed=1)
    x1, z = s.columns["x1"][:, 0], s.columns["z"]
    for i in range(z.shape[1]):
        r = abs(np.mean(x1 * z[:, i].conj())) / math.sqrt(np.mean(abs(x1) ** 2) * np.mean(abs(z[:, i]) ** 2))
        assert r <= 3 / math.sqrt(n)


def test_variance_identity():
    n = 1_000_000
    s = sample_scenario(DEFAULT, 1, n, seed=42)
    p = np.abs(s.columns["x1"][:, 0]) ** 2
    assert abs(p.mean() - 1.1) <= 3 * p.std() / math.sqrt(n)


def test_channel_sqrt_rejects_non_psd_table():
    p = ScenarioParams(correlation=CorrelationModel.from_table([1.0, 0.9, -0.9]))
    with pytest.raises(SingularMatrix):
        channel_sqrt(p, 3)


def test_measures_independent_and_self_kl():
    s = sample_scenario(ScenarioParams(alpha_A=0.0, alpha_B=0.0), 1, 200_000, seed=3)
    r = mc_gaussian_measures(s, MeasureRequest("mi", ("x1",), ("z",)))
    # plug-in MI is biased upward by about (dim / n) / ln 2
    assert abs(r.estimate) <= 3 * r.std_err + 2 * 2 / 200_000 / math.log(2)
    r = mc_gaussian_measures(s, MeasureRequest("kl", ("x1", "y2"), ("x1", "y2")))
    assert r.estimate == pytest.approx(0.0, abs=1e-12)


def test_xy_mi_matches_closed_form():
    s = sample_scenario(DEFAULT, 1, 1_000_000, seed=42)
    r = mc_gaussian_measures(s, MeasureRequest("mi", ("x1",), ("y2",)))
    assert abs(r.estimate - 2.5265458144958344) <= 3 * r.std_err
    assert abs(r.estimate - 2.5265458144958344) <= 1e-2


def test_rank_deficient_sample_covariance():
    s = sample_scenario(ScenarioParams(alpha_A=1.0, alpha_B=1.0, sigma_vA2=0.0, sigma_vB2=0.0), 1, 1000, seed=1)
    with pytest.raises(SingularMatrix):
        mc_gaussian_measures(s, MeasureRequest("mi", ("x1",), ("z",)))


def test_request_validation():
    with pytest.raises(ValueError):
        MeasureRequest("entropy", ("x1",), ("y2",))
    with pytest.raises(ValueError):
        MeasureRequest("cond_mi", ("x1",), ("y2",))


def test_quantized_cond_entropy_trivial_cases():
    s = sample_scenario(DEFAULT, 1, 10_000, seed=1)
    r = mc_quantized_cond_entropy(s, QuantizerSpec(0, 1.0), lep_combine(DEFAULT, 1, 2))
    assert r.estimate == 0.0
    p = ScenarioParams(alpha_A=0.0, alpha_B=1e-9)
    q = quantizer_for(p, 3, 0.01)
    s = sample_scenario(p, 1, 200_000, seed=2)
    r = mc_quantized_cond_entropy(s, q, lep_combine(p, 1, 2))
    assert abs(r.estimate - quantized_entropy(p, q)) <= 3 * r.std_err + 1e-9


def test_quantized_cond_entropy_section_vi():
    q = quantizer_for(DEFAULT, 3, 0.01)
    s = sample_scenario(DEFAULT, 1, 1_000_000, seed=42)
    r = mc_quantized_cond_entropy(s, q, lep_combine(DEFAULT, 1, 2))
    assert abs(r.estimate - acbca_sar_quantized(DEFAULT, 1, q).value) <= 3 * r.std_err


def test_std_err_scaling():
    q = quantizer_for(DEFAULT, 3, 0.01)
    lep = lep_combine(DEFAULT, 1, 2)
    small = sample_scenario(DEFAULT, 1, 100_000, seed=5)
    big = sample_scenario(DEFAULT, 1, 400_000, seed=5)
    for est in (lambda s: mc_quantized_cond_entropy(s, q, lep),
                lambda s: mc_gaussian_measures(s, MeasureRequest("cond_mi", ("x1",), ("y2",), ("z",)))):
        ratio = est(small).std_err / est(big).std_err
        assert 2 * 0.7 <= ratio <= 2 * 1.3


def test_forged_attack_kl():
    from sarlab.sar import pla_sar
    s = sample_scenario(DEFAULT, 1, 1_000_000, seed=42)
    train = sample_scenario(DEFAULT, 1, 1_000_000, seed=43)
    s = forge_attack(s, ("z",), train=train)
    r = mc_gaussian_measures(s, MeasureRequest("kl", ("x2t1", "x1"), ("x_attack", "x1")))
    assert abs(r.estimate - pla_sar(DEFAULT, 1).value) <= 3 * r.std_err


def test_covariance_checks_cover_every_entry():
    s = sample_scenario(DEFAULT, 2, 1000, seed=1)
    names = {c.name for c in covariance_checks(s)}
    assert len(names) == 7 * 8 // 2
    assert "x1,y2" in names and "z4,z4" in names
