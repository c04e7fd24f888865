import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sarlab.channel import ScenarioParams, build_covariances
from sarlab.errors import SingularMatrix
from sarlab.gaussian_info import (
    JointGaussian,
    clamp_nonneg,
    conditional_mi,
    kl_zero_mean_gaussians,
    mutual_information,
)
from sarlab.lep import lep_combine
from sarlab.sar import lep_joint

from oracles import gauss_mi_bits, kl_direct_bits


def random_psd(rng, n, complex_=True):
    a = rng.normal(size=(n, n))
    if complex_:
        a = a + 1j * rng.normal(size=(n, n))
    return a @ a.conj().T + 0.05 * np.eye(n)


def test_block_diagonal_independence():
    cov = np.diag([1.0, 2.0, 3.0])
    assert mutual_information(cov, [0], [1, 2]) == 0.0


def test_xy_mutual_information_closed_form():
    cov = np.array([[1.1, 1.0], [1.0, 1.1]])
    expected = -math.log2(1 - 1 / 1.21)
    assert mutual_information(cov, [0], [1]) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(2.5265458144958344, abs=1e-12)


def test_x1_z_section_vi():
    j = JointGaussian(build_covariances(ScenarioParams(), 1).joint_cov())
    # frozen from direct determinants
    assert mutual_information(j, [0], [3, 4]) == pytest.approx(0.37871981937803767, abs=1e-12)
    assert mutual_information(j, [0], [3, 4]) == pytest.approx(gauss_mi_bits(j.cov, [0], [3, 4]), abs=1e-12)


def test_conditional_mi_section_vi():
    j = JointGaussian(build_covariances(ScenarioParams(), 1).joint_cov())
    assert conditional_mi(j, [0], [1], [3, 4]) == pytest.approx(2.168597631406254, abs=1e-10)


def test_irrelevant_conditioning():
    cov = np.zeros((3, 3))
    cov[:2, :2] = [[1.1, 0.8], [0.8, 1.3]]
    cov[2, 2] = 2.0
    assert conditional_mi(cov, [0], [1], [2]) == pytest.approx(mutual_information(cov, [0], [1]), abs=1e-9)


def test_deterministic_link_is_infinite():
    cov = np.array([[1.0, 1.0], [1.0, 1.0]])
    assert mutual_information(cov, [0], [1]) == math.inf
    cov3 = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert conditional_mi(cov3, [0], [1], [2]) == math.inf


def test_singular_block_is_reduced():
    # two identical noise-free copies of h observed by Eve
    cov = np.array([[1.1, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]])
    assert mutual_information(cov, [0], [1, 2]) == pytest.approx(
        mutual_information(cov[:2, :2], [0], [1]), abs=1e-12)


def test_overlapping_blocks_rejected():
    with pytest.raises(ValueError):
        mutual_information(np.eye(3), [0, 1], [1])
    with pytest.raises(ValueError):
        conditional_mi(np.eye(3), [0], [1], [0])


def test_kl_values():
    p = np.diag([2.0, 2.0])
    assert kl_zero_mean_gaussians(p, p) == 0.0
    assert kl_zero_mean_gaussians(p, np.eye(2)) == pytest.approx((4 - 2 - math.log(4)) / math.log(2), abs=1e-12)
    assert kl_zero_mean_gaussians(p, np.eye(2)) == pytest.approx(0.8853900817779269, abs=1e-12)


def test_kl_errors():
    with pytest.raises(ValueError):
        kl_zero_mean_gaussians(np.eye(2), np.eye(3))
    with pytest.raises(SingularMatrix):
        kl_zero_mean_gaussians(np.eye(2), np.ones((2, 2)))


def test_kl_matches_sampled_log_ratio():
    # sample from p, average the log density ratio: importance-free MC
    rng = np.random.default_rng(3)
    p = random_psd(rng, 2)
    q = random_psd(rng, 2)
    n = 1_000_000
    lp = np.linalg.cholesky(p)
    w = (rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))) / math.sqrt(2)
    x = w @ lp.T
    qi, pi = np.linalg.inv(q), np.linalg.inv(p)
    quad_q = np.einsum("ni,ij,nj->n", x.conj(), qi, x).real
    quad_p = np.einsum("ni,ij,nj->n", x.conj(), pi, x).real
    ld = math.log(np.linalg.det(q).real / np.linalg.det(p).real)
    llr = (quad_q - quad_p + ld) / math.log(2)
    est, se = llr.mean(), llr.std() / math.sqrt(n)
    assert abs(kl_zero_mean_gaussians(p, q) - est) <= 3 * se


def test_clamp():
    assert clamp_nonneg(-1e-12, "x") == 0.0
    assert clamp_nonneg(0.5, "x") == 0.5
    with pytest.raises(Exception):
        clamp_nonneg(-1e-3, "x")


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(3, 6))
def test_measures_properties(seed, n):
    rng = np.random.default_rng(seed)
    cov = random_psd(rng, n)
    a, b, c = [0], [1], list(range(2, n))
    iab = mutual_information(cov, a, b)
    assert iab >= 0
    assert iab == mutual_information(cov, b, a)
    assert iab == pytest.approx(gauss_mi_bits(cov, a, b), abs=1e-9)
    assert conditional_mi(cov, a, b, c) >= 0
    # chain rule
    lhs = mutual_information(cov, a, b + c)
    rhs = mutual_information(cov, a, c) + conditional_mi(cov, a, b, c)
    assert lhs == pytest.approx(rhs, abs=1e-9)
    q = random_psd(rng, n)
    kl = kl_zero_mean_gaussians(cov, q)
    assert kl >= 0
    assert kl == pytest.approx(kl_direct_bits(cov, q), rel=1e-9, abs=1e-9)


def test_nonnegativity_many_random():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n = int(rng.integers(2, 6))
        cov = random_psd(rng, n, complex_=bool(rng.integers(2)))
        assert mutual_information(cov, [0], list(range(1, n))) >= 0
        if n >= 3:
            assert conditional_mi(cov, [0], [1], list(range(2, n))) >= 0
        assert kl_zero_mean_gaussians(cov, random_psd(rng, n)) >= 0


@pytest.mark.parametrize("t", [1, 2, 4])
@pytest.mark.parametrize("alpha", [0.2, 0.6, 0.95])
def test_data_processing_with_lep(t, alpha):
    from sarlab.channel import CorrelationModel
    for corr in (CorrelationModel(), CorrelationModel.jakes(0.05)):
        p = ScenarioParams(alpha_A=alpha, alpha_B=alpha / 2, correlation=corr)
        full = JointGaussian(build_covariances(p, t).joint_cov())
        n = full.dim
        for k in (1, 2):
            est = lep_combine(p, t, k)
            lj = lep_joint(p, t, est)
            assert mutual_information(lj, [1], [3]) <= mutual_information(full, [1], list(range(3, n))) + 1e-9
