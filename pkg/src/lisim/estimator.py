"""Pilot design and least-squares estimation of the effective channels.

The training matrix stacks one row per pilot symbol: a constant 1 for the
direct path and the per-element surface phases used during that symbol.
Choosing the first K+1 columns of a t_p-point DFT makes the columns
orthogonal, so the least-squares solution reduces to a matched filter.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .fading import ChannelRealization
from .params import LinkGains


@dataclass(frozen=True)
class PilotDesign:
    """Unit-modulus training matrix of shape (t_p, K+1).

    Column 0 is the all-ones direct-path column; columns 1..K hold the
    surface phase pattern applied during each training symbol.
    """

    t_p: int
    n_elements: int
    matrix: np.ndarray


@dataclass(frozen=True)
class EstimateResult:
    """Least-squares estimates of the effective (gain-absorbed) channels."""

    h_d_eff_hat: np.ndarray   # estimate of sqrt(beta_d) * h_d
    v_eff_hat: np.ndarray     # estimate of sqrt(beta_l) * v, shape (..., K)


def dft_pilot_design(K: int, t_p: int) -> PilotDesign:
    """Build the DFT training matrix for K elements and t_p pilot symbols.

    Entry (t, k) is exp(-j 2 pi t k / t_p) for zero-based t, k. Requires
    t_p >= K+1; with more pilots than that, the extra rows average noise
    down while the columns stay orthogonal (Gram = t_p * I).
    """
    if K < 0:
        raise PreconditionError(f"K must be >= 0 (got {K})")
    if t_p < K + 1:
        raise PreconditionError(
            f"least-squares estimate requires T_p >= K+1 (got T_p={t_p}, K={K})")
    t = np.arange(t_p)
    k = np.arange(K + 1)
    matrix = np.exp(-2j * np.pi * np.outer(t, k) / t_p)
    return PilotDesign(t_p=t_p, n_elements=K, matrix=matrix)


def simulate_pilots(chan: ChannelRealization, design: PilotDesign,
                    gains: LinkGains, p_pilot_lin: float, sigma_tr_sq: float,
                    rng: np.random.Generator) -> np.ndarray:
    """Received pilot vector, shape (..., t_p).

    y_t = sqrt(P_tr) (sqrt(beta_d) h_d + sqrt(beta_l) v^T phi_t) x_t + n_t
    with all pilot symbols x_t = 1 and circular complex Gaussian noise of
    variance sigma_tr_sq. Noise variables are drawn even when the variance
    is zero so the stream position does not depend on it.
    """
    if design.n_elements != chan.n_elements:
        raise PreconditionError(
            f"design built for K={design.n_elements}, channel has K={chan.n_elements}")
    u = np.concatenate(
        [np.sqrt(gains.beta_d) * chan.h_d[..., None], np.sqrt(gains.beta_l) * chan.v],
        axis=-1)
    shape = u.shape[:-1] + (design.t_p,)
    noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) \
        * math.sqrt(sigma_tr_sq / 2.0)
    return math.sqrt(p_pilot_lin) * (u @ design.matrix.T) + noise


def ls_estimate(y: np.ndarray, design: PilotDesign, p_pilot_lin: float) -> EstimateResult:
    """Least-squares estimate from received pilots of shape (..., t_p).

    Because the Gram matrix is t_p * I this equals the full normal-equation
    solution: estimate = A^H y / (sqrt(P_tr) t_p). The estimator is
    unbiased with independent per-coefficient error variance
    sigma_tr^2 / (P_tr * t_p).
    """
    y = np.asarray(y)
    if y.shape[-1] != design.t_p:
        raise PreconditionError(
            f"received vector has length {y.shape[-1]}, design expects {design.t_p}")
    est = (y @ np.conj(design.matrix)) / (math.sqrt(p_pilot_lin) * design.t_p)
    return EstimateResult(h_d_eff_hat=est[..., 0], v_eff_hat=est[..., 1:])
