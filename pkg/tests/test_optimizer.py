import math
from dataclasses import replace

import numpy as np
import pytest
import scipy.special

from lisim import (PreconditionError, SystemParams, bound_coeffs, derive_gains,
                   kstar_bruteforce, kstar_exact, kstar_highsnr, lambert_w0,
                   rtilde_derivative, rtilde_high_snr, rtilde_of_k)

TABLE1 = SystemParams(t_c=2000)
TABLE1_KSTAR = {-10.0: 355, -5.0: 325, 0.0: 300, 5.0: 278, 10.0: 258,
                15.0: 241, 20.0: 226}


def _w_bisect(x):
    lo, hi = 0.0, 60.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * math.exp(mid) < x:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_lambert_w0_special_points():
    assert lambert_w0(0.0) == 0.0
    assert lambert_w0(math.e) == pytest.approx(1.0, rel=1e-12)
    w = lambert_w0(138500.0)
    assert w == pytest.approx(_w_bisect(138500.0), abs=1e-9)
    assert w * math.exp(w) == pytest.approx(138500.0, rel=1e-12)


def test_lambert_w0_residual_on_log_grid():
    for x in np.logspace(-6, 9, 200):
        w = lambert_w0(float(x))
        assert abs(w * math.exp(w) - x) <= 1e-12 * x


def test_lambert_w0_matches_scipy():
    for x in np.logspace(-6, 9, 40):
        assert lambert_w0(float(x)) == pytest.approx(
            float(scipy.special.lambertw(x).real), rel=1e-12)


def test_lambert_w0_domain():
    with pytest.raises(PreconditionError):
        lambert_w0(-0.1)


def test_derivative_signs_at_interval_ends():
    assert rtilde_derivative(TABLE1, 1e-6) > 0
    assert rtilde_derivative(TABLE1, TABLE1.t_c - 1 - 1e-6) < 0
    with pytest.raises(PreconditionError):
        rtilde_derivative(TABLE1, 0.0)


def test_derivative_matches_finite_differences():
    h = 1e-3
    for params in (TABLE1, replace(TABLE1, p_data_dbw=20.0), SystemParams()):
        for k in (10.0, 100.0, 150.0):
            fd = (rtilde_of_k(params, k + h) - rtilde_of_k(params, k - h)) / (2 * h)
            assert rtilde_derivative(params, k) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("p_dbw,expected", sorted(TABLE1_KSTAR.items()))
def test_kstar_exact_reference_rows(p_dbw, expected):
    res = kstar_exact(replace(TABLE1, p_data_dbw=p_dbw))
    assert abs(res.k_star - expected) <= 1
    assert abs(res.k_star - res.k_real) <= 0.5 + 1e-6
    assert res.method == "exact_root"


def test_kstar_exact_short_block():
    res = kstar_exact(SystemParams())
    assert res.k_star == kstar_bruteforce(SystemParams()).k_star == 36


def test_kstar_highsnr_reference_values():
    # frozen from direct evaluation of the closed form with a
    # bisection-verified Lambert W
    assert kstar_highsnr(TABLE1).k_star == 307
    assert kstar_highsnr(replace(TABLE1, p_data_dbw=20.0)).k_star == 234


def test_kstar_highsnr_decreases_when_snr_grows():
    base = kstar_highsnr(TABLE1).k_star
    boosted = kstar_highsnr(replace(TABLE1, p_data_dbw=20.0)).k_star
    assert boosted < base


def test_high_snr_rate_gap_shrinks_with_power():
    # The gap decreases in P but does not vanish at fixed K: the leading
    # form drops the bK + c terms, leaving prelog * log2(q / (a K^2)) in
    # the limit. At K = 200 that offset is about 0.107 b/s/Hz; pushing K
    # up shrinks it below 0.05.
    gaps = []
    for p_dbw in (20.0, 30.0, 40.0):
        p = replace(TABLE1, p_data_dbw=p_dbw)
        gaps.append(abs(rtilde_of_k(p, 200) - rtilde_high_snr(p, 200)))
    assert gaps[0] > gaps[1] > gaps[2]
    c = bound_coeffs(TABLE1)
    q_ratio = 1.0 + c.b / (c.a * 200) + c.c / (c.a * 200 ** 2)
    limit = (1 - 201 / TABLE1.t_c) * math.log2(q_ratio)
    assert gaps[-1] == pytest.approx(limit, abs=1e-3)
    p40 = replace(TABLE1, p_data_dbw=40.0)
    assert abs(rtilde_of_k(p40, 450) - rtilde_high_snr(p40, 450)) < 0.05


def test_high_snr_rate_edge_and_domain():
    c = bound_coeffs(TABLE1)
    gbar = derive_gains(TABLE1).gamma_bar
    k_edge = 1.0 / math.sqrt(gbar * c.a)
    assert rtilde_high_snr(TABLE1, k_edge) == 0.0
    with pytest.raises(PreconditionError):
        rtilde_high_snr(TABLE1, 0.5 * k_edge)


def test_high_snr_argmax_matches_formula():
    res = kstar_highsnr(TABLE1)
    c = bound_coeffs(TABLE1)
    gbar = derive_gains(TABLE1).gamma_bar
    k_min = math.ceil(1.0 / math.sqrt(gbar * c.a))
    ks = range(max(1, k_min), TABLE1.t_c - 1)
    best = max(ks, key=lambda k: rtilde_high_snr(TABLE1, k))
    assert abs(best - res.k_star) <= 1


def test_bruteforce_tiny_instance():
    p = SystemParams(t_c=10)
    res = kstar_bruteforce(p)
    vals = {k: rtilde_of_k(p, k) for k in range(1, 10)}
    assert res.k_star == min(k for k, v in vals.items() if v == max(vals.values()))
    assert res.r_tilde_at_k == max(vals.values())


def test_bruteforce_dominates_exact():
    for p_dbw in (-10.0, 0.0, 20.0):
        p = replace(TABLE1, p_data_dbw=p_dbw)
        bf = kstar_bruteforce(p)
        ex = kstar_exact(p)
        assert bf.r_tilde_at_k >= ex.r_tilde_at_k - 1e-9
        assert abs(bf.k_star - ex.k_star) <= 1


def test_root_uniqueness_unit_scan():
    for params in (TABLE1, replace(TABLE1, p_data_dbw=20.0), SystemParams()):
        coeffs = bound_coeffs(params)
        gbar = derive_gains(params).gamma_bar
        from lisim.optimizer import _deriv
        ks = np.arange(1, params.t_c - 1, dtype=float)
        signs = np.sign(_deriv(coeffs, gbar, params.t_c, ks))
        assert np.count_nonzero(np.diff(signs)) == 1


def test_concavity_second_differences():
    for params in (SystemParams(), TABLE1, replace(TABLE1, p_data_dbw=20.0)):
        ks = np.arange(1, params.t_c)
        vals = np.array([rtilde_of_k(params, int(k)) for k in ks])
        d2 = vals[2:] - 2 * vals[1:-1] + vals[:-2]
        assert np.all(d2 < 0)


def test_kstar_scaling_in_block_length():
    results = [kstar_exact(replace(TABLE1, t_c=tc)).k_star
               for tc in (200, 500, 1000, 2000, 5000)]
    assert all(a <= b for a, b in zip(results, results[1:]))
    ratios = [k * math.log(tc) / tc
              for k, tc in zip(results, (200, 500, 1000, 2000, 5000))]
    assert max(ratios) / min(ratios) < 2.0


def test_kstar_strictly_decreasing_in_power():
    results = [kstar_exact(replace(TABLE1, p_data_dbw=p)).k_star
               for p in sorted(TABLE1_KSTAR)]
    assert all(a > b for a, b in zip(results, results[1:]))


def test_kstar_depends_only_on_scaled_coefficients():
    # beta_d and beta_l both x10 while P drops 10 dB: gbar*(a,b,c) unchanged
    base = kstar_exact(TABLE1)
    scaled = kstar_exact(replace(TABLE1,
                                 c0_db=TABLE1.c0_db + 10.0,
                                 d1_m=TABLE1.d1_m * math.sqrt(10.0),
                                 p_data_dbw=TABLE1.p_data_dbw - 10.0))
    assert scaled.k_star == base.k_star
    assert scaled.k_real == pytest.approx(base.k_real, abs=1e-5)


def test_highsnr_close_to_exact_at_high_power():
    for p_dbw in (10.0, 15.0, 20.0):
        p = replace(TABLE1, p_data_dbw=p_dbw)
        ex = kstar_exact(p).k_star
        hi = kstar_highsnr(p).k_star
        assert abs(hi - ex) <= 0.05 * ex
