"""Overhead-aware achievable rate: Monte-Carlo estimate and analytic bound.

The rate of interest is (1 - T_p/T_c) E[log2(1 + gbar |combined gain|^2)].
The estimated mode runs the full pipeline per trial (channel draw, pilot
reception, least-squares estimate, phase configuration from estimates);
the genie mode configures phases from the true channels instead and upper
bounds it. The closed-form bound replaces the expectation by a quadratic
in K built from the fractional Nakagami moments.
"""

import math
from dataclasses import dataclass

import numpy as np

from .beamform import PhaseConfig, estimated_phases, optimal_phases
from .errors import PreconditionError
from .estimator import dft_pilot_design, ls_estimate, simulate_pilots
from .fading import ChannelRealization, delta_moment, sample_channel
from .params import LinkGains, SystemParams, derive_gains

MODES = ("estimated", "genie")

# Trials per RNG block. Fixed so that splitting blocks across workers (or
# not) can never change which stream produced which trial.
BATCH = 4096


@dataclass(frozen=True)
class RateEstimate:
    mean_bps_hz: float
    std_error: float
    n_trials: int
    mode: str


@dataclass(frozen=True)
class BoundCoefficients:
    """Quadratic bound coefficients and the moments they are built from."""

    a: float
    b: float
    c: float
    delta1: float
    delta2: float
    delta3: float


def instantaneous_rate(chan: ChannelRealization, phases: PhaseConfig,
                       gains: LinkGains):
    """log2(1 + gbar |sqrt(beta_d) h_d + sqrt(beta_l) phi^T v|^2), no pre-log.

    Vectorized over leading batch dimensions; K = 0 (empty phi and v)
    degenerates to the direct link alone.
    """
    reflected = np.sum(phases.phi * chan.v, axis=-1)
    combined = np.sqrt(gains.beta_d) * chan.h_d + np.sqrt(gains.beta_l) * reflected
    return np.log2(1.0 + gains.gamma_bar * np.abs(combined) ** 2)


def _check_pilot_window(K: int, t_p: int, t_c: int, mode: str):
    if mode not in MODES:
        raise PreconditionError(f"mode must be one of {MODES} (got {mode!r})")
    if K < 1:
        raise PreconditionError(f"K must be >= 1 (got {K})")
    if not (1 <= t_p < t_c):
        raise PreconditionError(f"need 1 <= t_p < t_c (got t_p={t_p}, t_c={t_c})")
    if mode == "estimated" and t_p < K + 1:
        raise PreconditionError(
            f"least-squares estimate requires T_p >= K+1 (got T_p={t_p}, K={K})")


def _batch_seeds(seed: int, n_trials: int):
    n_batches = (n_trials + BATCH - 1) // BATCH
    return np.random.SeedSequence(seed).spawn(n_batches)


def _reduce(sums, sumsqs, n: int):
    # fsum is exactly rounded, so the reduction result does not depend on
    # how the per-batch partials were produced or ordered.
    mean = math.fsum(sums) / n
    if n > 1:
        var = max(0.0, (math.fsum(sumsqs) - n * mean * mean) / (n - 1))
        se = math.sqrt(var / n)
    else:
        se = 0.0
    return mean, se


def mc_rate(params: SystemParams, K: int, t_p: int, mode: str = "estimated") -> RateEstimate:
    """Monte-Carlo mean of the overhead-aware rate over params.n_trials draws.

    Deterministic for a given params.seed. Channels are drawn before pilot
    noise inside each block, so runs with equal seeds pair the two modes
    on identical channel realizations.
    """
    _check_pilot_window(K, t_p, params.t_c, mode)
    gains = derive_gains(params)
    sigma_sq = params.noise_w()
    p_pilot = params.p_pilot_w()
    design = dft_pilot_design(K, t_p) if mode == "estimated" else None
    prelog = 1.0 - t_p / params.t_c
    sums, sumsqs = [], []
    done = 0
    for child in _batch_seeds(params.seed, params.n_trials):
        n_block = min(BATCH, params.n_trials - done)
        rng = np.random.default_rng(child)
        chan = sample_channel(K, params, rng, size=n_block)
        if mode == "estimated":
            y = simulate_pilots(chan, design, gains, p_pilot, sigma_sq, rng)
            phases = estimated_phases(ls_estimate(y, design, p_pilot))
        else:
            phases = optimal_phases(chan.h_d, chan.v)
        r = prelog * instantaneous_rate(chan, phases, gains)
        sums.append(float(np.sum(r)))
        sumsqs.append(float(np.sum(r * r)))
        done += n_block
    mean, se = _reduce(sums, sumsqs, params.n_trials)
    return RateEstimate(mean_bps_hz=mean, std_error=se, n_trials=params.n_trials, mode=mode)


def mc_rate_profile(params: SystemParams, k_values, mode: str = "estimated"):
    """Estimated rate at t_p = K+1 for each K, on shared channel draws.

    All K values reuse the first K columns of one channel block and the
    first K+1 entries of one pilot-noise block, so differences across K
    carry far less Monte-Carlo noise than independent runs would. Use this
    when locating the rate-maximizing K numerically.
    """
    k_values = [int(k) for k in k_values]
    k_max = max(k_values)
    for k in k_values:
        _check_pilot_window(k, k + 1, params.t_c, mode)
    gains = derive_gains(params)
    sigma_sq = params.noise_w()
    p_pilot = params.p_pilot_w()
    designs = {k: dft_pilot_design(k, k + 1) for k in k_values} \
        if mode == "estimated" else {}
    sums = {k: [] for k in k_values}
    sumsqs = {k: [] for k in k_values}
    done = 0
    for child in _batch_seeds(params.seed, params.n_trials):
        n_block = min(BATCH, params.n_trials - done)
        rng = np.random.default_rng(child)
        chan = sample_channel(k_max, params, rng, size=n_block)
        shape = (n_block, k_max + 1)
        noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) \
            * math.sqrt(sigma_sq / 2.0)
        for k in k_values:
            sub = ChannelRealization(h=chan.h[:, :k], g=chan.g[:, :k], h_d=chan.h_d)
            if mode == "estimated":
                design = designs[k]
                u = np.concatenate(
                    [np.sqrt(gains.beta_d) * sub.h_d[:, None], np.sqrt(gains.beta_l) * sub.v],
                    axis=-1)
                y = math.sqrt(p_pilot) * (u @ design.matrix.T) + noise[:, :k + 1]
                phases = estimated_phases(ls_estimate(y, design, p_pilot))
            else:
                phases = optimal_phases(sub.h_d, sub.v)
            r = (1.0 - (k + 1) / params.t_c) * instantaneous_rate(sub, phases, gains)
            sums[k].append(float(np.sum(r)))
            sumsqs[k].append(float(np.sum(r * r)))
        done += n_block
    out = []
    for k in k_values:
        mean, se = _reduce(sums[k], sumsqs[k], params.n_trials)
        out.append(RateEstimate(mean_bps_hz=mean, std_error=se,
                                n_trials=params.n_trials, mode=mode))
    return out


def bound_coeffs(params: SystemParams) -> BoundCoefficients:
    """Coefficients of the quadratic E|combined gain|^2 = a K^2 + b K + c."""
    gains = derive_gains(params)
    d1 = delta_moment(params.m1)
    d2 = delta_moment(params.m2)
    d3 = delta_moment(params.m3)
    d12sq = (d1 * d2) ** 2
    a = gains.beta_l * d12sq
    b = gains.beta_l * (1.0 - d12sq) + 2.0 * math.sqrt(gains.beta_d * gains.beta_l) * d1 * d2 * d3
    return BoundCoefficients(a=a, b=b, c=gains.beta_d,
                             delta1=d1, delta2=d2, delta3=d3)


def rtilde_from_coeffs(coeffs: BoundCoefficients, gamma_bar: float, t_c: int, k):
    """Bound value at t_p = K+1 as a function of (possibly array) K."""
    k = np.asarray(k, dtype=float)
    q = coeffs.a * k * k + coeffs.b * k + coeffs.c
    return (1.0 - (k + 1.0) / t_c) * np.log2(1.0 + gamma_bar * q)


def rate_upper_bound(params: SystemParams, K, t_p) -> float:
    """Closed-form upper bound (1 - t_p/t_c) log2(1 + gbar(aK^2 + bK + c))."""
    if K < 0:
        raise PreconditionError(f"K must be >= 0 (got {K})")
    if not (0 < t_p < params.t_c):
        raise PreconditionError(f"need 0 < t_p < t_c (got t_p={t_p}, t_c={params.t_c})")
    coeffs = bound_coeffs(params)
    gains = derive_gains(params)
    q = coeffs.a * K * K + coeffs.b * K + coeffs.c
    return (1.0 - t_p / params.t_c) * math.log2(1.0 + gains.gamma_bar * q)


def rtilde_of_k(params: SystemParams, K) -> float:
    """Bound along the minimal-pilot diagonal t_p = K+1, continuous in K.

    Real-valued K is allowed so root finders can work on this directly;
    integer semantics live in the optimizer.
    """
    if not (0 < K <= params.t_c - 1):
        raise PreconditionError(f"need 0 < K <= t_c - 1 (got K={K}, t_c={params.t_c})")
    coeffs = bound_coeffs(params)
    gains = derive_gains(params)
    return float(rtilde_from_coeffs(coeffs, gains.gamma_bar, params.t_c, K))
