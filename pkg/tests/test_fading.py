import numpy as np
import pytest
import scipy.special as sp
import scipy.stats

from lisim import (PreconditionError, SystemParams, delta_moment,
                   rician_to_m, sample_channel, sample_nakagami)


def test_delta_moment_closed_forms():
    assert delta_moment(0.5) == pytest.approx(np.sqrt(2 / np.pi), rel=1e-12)
    assert delta_moment(1.0) == pytest.approx(np.sqrt(np.pi) / 2, rel=1e-12)
    # independent gamma-function route
    assert delta_moment(2.0) == pytest.approx(
        float(sp.gamma(2.5) / (np.sqrt(2.0) * sp.gamma(2.0))), rel=1e-12)


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 5.0, 40.0, 1e6])
def test_delta_moment_in_unit_interval(m):
    d = delta_moment(m)
    assert 0.0 < d < 1.0


def test_delta_moment_domain():
    with pytest.raises(PreconditionError):
        delta_moment(0.4)


def test_rician_to_m():
    assert rician_to_m(0.0) == 1.0
    assert rician_to_m(1.0) == pytest.approx(4.0 / 3.0, rel=1e-12)
    assert rician_to_m(10.0) == pytest.approx(121.0 / 21.0, rel=1e-12)
    with pytest.raises(PreconditionError):
        rician_to_m(-0.1)


def test_nakagami_power_normalization():
    rng = np.random.default_rng(101)
    w = sample_nakagami(0.5, rng, size=10 ** 6)
    assert np.mean(w ** 2) == pytest.approx(1.0, abs=0.01)


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 5.0])
def test_nakagami_mean_matches_delta(m):
    n = 10 ** 6
    rng = np.random.default_rng(202)
    w = sample_nakagami(m, rng, size=n)
    se = np.std(w, ddof=1) / np.sqrt(n)
    assert abs(np.mean(w) - delta_moment(m)) < 3 * se


def test_nakagami_seed_determinism():
    a = sample_nakagami(0.7, np.random.default_rng(9), size=100)
    b = sample_nakagami(0.7, np.random.default_rng(9), size=100)
    np.testing.assert_array_equal(a, b)


def test_sample_channel_cascade_definition():
    p = SystemParams()
    chan = sample_channel(1, p, np.random.default_rng(3))
    assert abs(chan.v[0]) == pytest.approx(abs(chan.h[0]) * abs(chan.g[0]), rel=1e-12)


def test_sample_channel_shapes_and_range():
    p = SystemParams()
    chan = sample_channel(4, p, np.random.default_rng(3), size=10)
    assert chan.h.shape == (10, 4) and chan.h_d.shape == (10,)
    assert np.all(np.abs(chan.h) > 0)
    with pytest.raises(PreconditionError):
        sample_channel(0, p, np.random.default_rng(3))
    with pytest.raises(PreconditionError):
        sample_channel(p.t_c, p, np.random.default_rng(3))


def test_cascade_mean_is_product_of_moments():
    p = SystemParams(m1=0.5, m2=2.0)
    chan = sample_channel(2, p, np.random.default_rng(11), size=200000)
    mags = np.abs(chan.v).ravel()
    se = np.std(mags, ddof=1) / np.sqrt(mags.size)
    expected = delta_moment(0.5) * delta_moment(2.0)
    assert abs(np.mean(mags) - expected) < 3 * se


@pytest.mark.parametrize("K", [1, 2, 5])
def test_cascade_sum_second_moment(K):
    # brute-force check of E[(sum |h_i||g_i|)^2] = K + K(K-1) d1^2 d2^2
    p = SystemParams(m1=0.5, m2=0.5)
    chan = sample_channel(K, p, np.random.default_rng(17), size=400000)
    s = np.sum(np.abs(chan.v), axis=-1)
    sq = s ** 2
    d1, d2 = delta_moment(0.5), delta_moment(0.5)
    expected = K + K * (K - 1) * d1 ** 2 * d2 ** 2
    se = np.std(sq, ddof=1) / np.sqrt(sq.size)
    assert abs(np.mean(sq) - expected) < 3 * se


def test_cascade_sum_second_moment_k3_value():
    # frozen: 3 + 6 (2/pi)^2
    p = SystemParams()
    chan = sample_channel(3, p, np.random.default_rng(23), size=600000)
    sq = np.sum(np.abs(chan.v), axis=-1) ** 2
    se = np.std(sq, ddof=1) / np.sqrt(sq.size)
    assert abs(np.mean(sq) - 5.431708407416107) < 3 * se


def test_phase_uniformity_chi_square():
    p = SystemParams()
    chan = sample_channel(1, p, np.random.default_rng(29), size=100000)
    angles = np.angle(chan.h).ravel() % (2 * np.pi)
    counts, _ = np.histogram(angles, bins=36, range=(0, 2 * np.pi))
    expected = angles.size / 36
    stat = np.sum((counts - expected) ** 2 / expected)
    assert stat < scipy.stats.chi2.ppf(0.99, df=35)
