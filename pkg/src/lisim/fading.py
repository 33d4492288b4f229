"""Nakagami-m small-scale channel generation.

Magnitudes follow a unit-power Nakagami-m law, phases are independent and
uniform on [0, 2pi). The surface sees the elementwise product of the two
hop coefficients, which is the quantity the pilot phase can estimate.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .params import SystemParams


def delta_moment(m: float) -> float:
    """First absolute moment E[w] of a unit-power Nakagami-m variable.

    Equals Gamma(m + 1/2) / (sqrt(m) * Gamma(m)); computed through lgamma
    so large m does not overflow. Lies in (0, 1) and tends to 1 as m grows.
    """
    if not (m >= 0.5 and math.isfinite(m)):
        raise PreconditionError(f"Nakagami parameter must be >= 0.5 (got {m})")
    return math.exp(math.lgamma(m + 0.5) - math.lgamma(m)) / math.sqrt(m)


def rician_to_m(kappa: float) -> float:
    """Nakagami shape approximating a Rician channel with factor kappa."""
    if not (kappa >= 0 and math.isfinite(kappa)):
        raise PreconditionError(f"Rician factor must be >= 0 (got {kappa})")
    return (kappa + 1.0) ** 2 / (2.0 * kappa + 1.0)


def sample_nakagami(m: float, rng: np.random.Generator, size=None):
    """Draw unit-power Nakagami-m magnitudes.

    Exact law: w = sqrt(G) with G ~ Gamma(shape=m, scale=1/m), so
    E[w^2] = 1 for every m. No Gaussian approximation is involved, which
    matters because m = 0.5 is a default here.
    """
    if not (m >= 0.5 and math.isfinite(m)):
        raise PreconditionError(f"Nakagami parameter must be >= 0.5 (got {m})")
    return np.sqrt(rng.gamma(shape=m, scale=1.0 / m, size=size))


@dataclass(frozen=True)
class ChannelRealization:
    """One draw (or a batch of draws) of all small-scale coefficients.

    h and g have shape (..., K), h_d has the matching batch shape. The
    cascade v is recomputed on access so it can never go stale.
    """

    h: np.ndarray
    g: np.ndarray
    h_d: np.ndarray

    @property
    def v(self) -> np.ndarray:
        return self.h * self.g

    @property
    def n_elements(self) -> int:
        return self.h.shape[-1]


def sample_channel(K: int, params: SystemParams, rng: np.random.Generator,
                   size=None) -> ChannelRealization:
    """Draw the three fading links for a K-element surface.

    Draw order is fixed (all magnitudes, then all phases) so that two
    consumers starting from equal stream states see identical channels
    regardless of what they draw afterwards; pilot noise is always drawn
    after the channel.
    """
    if not (1 <= K < params.t_c):
        raise PreconditionError(f"need 1 <= K < t_c (got K={K}, t_c={params.t_c})")
    vec_shape = (K,) if size is None else (size, K)
    sc_shape = None if size is None else size
    mag_h = sample_nakagami(params.m1, rng, size=vec_shape)
    mag_g = sample_nakagami(params.m2, rng, size=vec_shape)
    mag_d = sample_nakagami(params.m3, rng, size=sc_shape)
    ph_h = rng.uniform(0.0, 2.0 * np.pi, size=vec_shape)
    ph_g = rng.uniform(0.0, 2.0 * np.pi, size=vec_shape)
    ph_d = rng.uniform(0.0, 2.0 * np.pi, size=sc_shape)
    return ChannelRealization(
        h=mag_h * np.exp(1j * ph_h),
        g=mag_g * np.exp(1j * ph_g),
        h_d=np.asarray(mag_d * np.exp(1j * ph_d)),
    )
