"""Surface phase configuration for data transmission."""

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .estimator import EstimateResult


@dataclass(frozen=True)
class PhaseConfig:
    """Unit-modulus reflection coefficients, shape (..., K)."""

    phi: np.ndarray


def optimal_phases(h_d, v) -> PhaseConfig:
    """SNR-maximizing phases phi_i = exp(j angle(h_d / v_i)).

    Each reflected term phi_i * v_i then points along h_d, so the combined
    gain magnitude becomes sqrt(beta_d)|h_d| + sqrt(beta_l) sum_i |v_i|.
    Zero coefficients are a probability-zero event under continuous fading;
    they raise instead of being patched so upstream bugs surface.
    """
    h_d = np.asarray(h_d)
    v = np.asarray(v)
    if np.any(h_d == 0) or np.any(v == 0):
        raise PreconditionError("zero channel coefficient, phase undefined")
    phi = np.exp(1j * (np.angle(h_d)[..., None] - np.angle(v)))
    return PhaseConfig(phi=phi)


def estimated_phases(est: EstimateResult) -> PhaseConfig:
    """Phases from least-squares estimates instead of true channels.

    Only the angles of the estimates enter, so any positive rescaling of
    both estimates (effective vs normalized coefficients) gives the same
    configuration.
    """
    return optimal_phases(est.h_d_eff_hat, est.v_eff_hat)
