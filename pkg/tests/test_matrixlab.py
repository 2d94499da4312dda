"""Counter-based sampling, the two matrix models, and spectral statistics."""

import math

import numpy as np
import pytest

from filtered_spectra.kernel import compass_filter, constant_kernel, \
    kernel_from_filter
from filtered_spectra.matrixlab import (ESD, SampleConfig, covariance_check,
                                        eigenvalues_symmetric, esd_statistics,
                                        sample_colored_gaussian,
                                        sample_filtered_wigner)
from filtered_spectra.rng import (gaussian_entries, philox4x32_10,
                                  rademacher_entries, uniform_pair)


# Known-answer vectors for Philox4x32-10 (zero and pi-digit inputs).
def test_philox_kat_zeros():
    out = philox4x32_10(0, 0, 0, 0, 0)
    assert [int(w) for w in out] == [0x6627e8d5, 0xe169c58d,
                                     0xbc57ac4c, 0x9b00dbd8]


def test_philox_kat_pi_digits():
    seed = (0x299f31d0 << 32) | 0xa4093822
    out = philox4x32_10(0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344, seed)
    assert [int(w) for w in out] == [0xd16cfe09, 0x94fdcceb,
                                     0x5001e420, 0x24126ea1]


def test_philox_broadcasts():
    c0 = np.array([0, 1, 2, 3])
    vec = philox4x32_10(c0, 5, 6, 7, 99)
    for t in range(4):
        one = philox4x32_10(t, 5, 6, 7, 99)
        assert all(int(vec[w][t]) == int(one[w]) for w in range(4))


def test_uniforms_strictly_inside_unit_interval():
    idx = np.arange(20000)
    u1, u2 = uniform_pair(7, 0, idx, idx + 1)
    for u in (u1, u2):
        assert u.min() > 0.0
        assert u.max() < 1.0


def test_gaussian_field_statistics():
    idx = np.arange(100000)
    g = gaussian_entries(123, 0, idx, idx + 1)
    assert abs(g.mean()) < 0.02
    assert abs(g.std() - 1.0) < 0.02
    # determinism and trial/stream separation
    again = gaussian_entries(123, 0, idx, idx + 1)
    assert np.array_equal(g, again)
    assert not np.array_equal(g, gaussian_entries(123, 1, idx, idx + 1))
    assert not np.array_equal(g, gaussian_entries(123, 0, idx, idx + 1,
                                                  stream=1))
    assert not np.array_equal(g, gaussian_entries(124, 0, idx, idx + 1))


def test_rademacher_values():
    idx = np.arange(4000)
    r = rademacher_entries(5, 2, idx, 2 * idx + 1)
    assert set(np.unique(r)) == {-1.0, 1.0}
    assert abs(r.mean()) < 0.08


def test_filtered_sample_symmetric_and_deterministic(compass):
    cfg = SampleConfig(N=40, seed=11)
    X = sample_filtered_wigner(cfg, compass)
    assert np.array_equal(X, X.T)
    assert np.array_equal(X, sample_filtered_wigner(cfg, compass))
    assert not np.array_equal(X, sample_filtered_wigner(cfg, compass,
                                                        trial=1))


def test_filtered_entry_is_the_windowed_convolution(compass):
    # X_{2,4} = (Y_{1,3} + Y_{1,5} + Y_{3,5} + Y_{3,3}) / 2 and Y_{3,3} = 0
    cfg = SampleConfig(N=6, seed=3)
    X = sample_filtered_wigner(cfg, compass)
    y13 = float(gaussian_entries(3, 0, 1, 3))
    y15 = float(gaussian_entries(3, 0, 1, 5))
    y35 = float(gaussian_entries(3, 0, 3, 5))
    assert X[1, 3] == pytest.approx(0.5 * (y13 + y15 + y35), rel=1e-14)


def test_filtered_boundary_rows_lose_taps(compass):
    # row 1 has no sites above it: X_{1,j} only sees the k = 2 taps
    cfg = SampleConfig(N=6, seed=9)
    X = sample_filtered_wigner(cfg, compass)
    y23 = float(gaussian_entries(9, 0, 2, 3))
    y25 = float(gaussian_entries(9, 0, 2, 5))
    assert X[0, 3] == pytest.approx(0.5 * (y23 + y25), rel=1e-14)


def test_rademacher_model_runs(compass):
    cfg = SampleConfig(N=30, seed=4, entry_law="rademacher")
    X = sample_filtered_wigner(cfg, compass)
    assert np.array_equal(X, X.T)
    vals = np.unique(np.abs(np.round(X * 2).astype(int)))
    assert vals.max() <= 8          # at most 4 taps of 1/2 each, signed


def test_sample_config_validation():
    with pytest.raises(ValueError):
        SampleConfig(N=0, seed=1)
    with pytest.raises(ValueError):
        SampleConfig(N=10, seed=1, trials=0)
    with pytest.raises(ValueError):
        SampleConfig(N=10, seed=1, entry_law="uniform")


def test_covariance_check_matches_theory(compass):
    cfg = SampleConfig(N=48, seed=21, trials=20000)
    rep = covariance_check(compass, cfg, (10, 20, 12, 22))
    assert rep.theoretical == 0.25           # s_{-2,2} for the compass
    assert abs(rep.z_score) < 4.0
    rep0 = covariance_check(compass, cfg, (10, 20, 12, 30))
    assert rep0.theoretical == 0.0           # outside the band
    assert abs(rep0.z_score) < 4.0


def test_covariance_check_refuses_boundary_indices(compass):
    cfg = SampleConfig(N=48, seed=21, trials=10)
    with pytest.raises(ValueError, match="general position"):
        covariance_check(compass, cfg, (2, 20, 12, 30))     # near 0
    with pytest.raises(ValueError, match="general position"):
        covariance_check(compass, cfg, (10, 20, 47, 30))    # near N
    with pytest.raises(ValueError, match="general position"):
        covariance_check(compass, cfg, (10, 12, 20, 30))    # j - i <= K


def test_colored_sample_shape_and_symmetry():
    kern = kernel_from_filter(compass_filter())
    M = sample_colored_gaussian(kern, 12, seed=8)
    assert M.shape == (144, 144)
    assert np.array_equal(M, M.T)
    assert np.array_equal(M, sample_colored_gaussian(kern, 12, seed=8))
    assert not np.array_equal(M, sample_colored_gaussian(kern, 12, seed=8,
                                                         trial=1))
    with pytest.raises(ValueError):
        sample_colored_gaussian(kern, 65, seed=8)


def test_colored_second_moment_near_limit():
    kern = kernel_from_filter(compass_filter())
    M = sample_colored_gaussian(kern, 20, seed=15)
    esd = ESD.from_matrix(M, kmax=2)
    assert esd.empirical_moments[1] == pytest.approx(1.0, abs=0.15)


def test_colored_semicircle_variance_profile():
    # s = 1: entries are plain N(0,1) with sqrt(2) diagonal
    M = sample_colored_gaussian(constant_kernel(), 10, seed=2)
    off = M[np.triu_indices(100, 1)]
    assert abs(off.std() - 1.0) < 0.05
    assert abs(np.diag(M).std() - math.sqrt(2.0)) < 0.35


def test_eigenvalues_match_lapack_reference():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((40, 40))
    S = (A + A.T) / 2.0
    got = eigenvalues_symmetric(S)
    want = np.linalg.eigvalsh(S)
    assert np.max(np.abs(got - want)) < 1e-10
    with pytest.raises(AssertionError):
        eigenvalues_symmetric(A)


def test_esd_from_diagonal_matrix():
    esd = ESD.from_matrix(np.diag([1.0, 2.0, 3.0]), kmax=3)
    lam = np.array([1.0, 2.0, 3.0]) / math.sqrt(3.0)
    for k in (1, 2, 3):
        assert esd.empirical_moments[k - 1] == pytest.approx(
            np.mean(lam ** k))


def test_esd_statistics_aggregation(compass):
    cfg = SampleConfig(N=60, seed=31)
    mats = [sample_filtered_wigner(cfg, compass, trial=t) for t in range(3)]
    summary = esd_statistics(mats, kmax=4)
    assert len(summary.moment_mean) == 4
    assert all(se > 0 for se in summary.moment_stderr)
    assert sum(summary.hist_mass) == pytest.approx(1.0)
    single = esd_statistics(mats[:1], kmax=4)
    assert all(se > 0 for se in single.moment_stderr)
    with pytest.raises(ValueError):
        esd_statistics(mats, kmax=11)


def test_moment_fluctuations_shrink_with_n(compass):
    def m4_samples(N, trials=6):
        cfg = SampleConfig(N=N, seed=77)
        out = []
        for t in range(trials):
            X = sample_filtered_wigner(cfg, compass, trial=t)
            out.append(ESD.from_matrix(X, kmax=4).empirical_moments[3])
        return np.array(out)

    v_small = m4_samples(150).var(ddof=1)
    v_large = m4_samples(600).var(ddof=1)
    assert v_small > 2.0 * v_large
