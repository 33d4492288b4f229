"""Simulator and optimizer for surface-assisted single-antenna links.

Quantifies the trade-off between the power gain of a passive reflecting
surface and the pilot overhead of estimating its cascaded channel, and
computes the rate-maximizing number of surface elements.
"""

__version__ = "0.1.0"

from .beamform import PhaseConfig, estimated_phases, optimal_phases
from .errors import ConfigError, PreconditionError
from .estimator import (EstimateResult, PilotDesign, dft_pilot_design,
                        ls_estimate, simulate_pilots)
from .fading import (ChannelRealization, delta_moment, rician_to_m,
                     sample_channel, sample_nakagami)
from .optimizer import (KStarResult, kstar_bruteforce, kstar_exact,
                        kstar_highsnr, lambert_w0, rtilde_derivative,
                        rtilde_high_snr)
from .params import LinkGains, SystemParams, derive_gains, load_config
from .rate import (BoundCoefficients, RateEstimate, bound_coeffs,
                   instantaneous_rate, mc_rate, mc_rate_profile,
                   rate_upper_bound, rtilde_of_k)

__all__ = [
    "ChannelRealization", "ConfigError", "BoundCoefficients",
    "EstimateResult", "KStarResult", "LinkGains", "PhaseConfig",
    "PilotDesign", "PreconditionError", "RateEstimate", "SystemParams",
    "bound_coeffs", "delta_moment", "derive_gains", "dft_pilot_design",
    "estimated_phases", "instantaneous_rate", "kstar_bruteforce",
    "kstar_exact", "kstar_highsnr", "lambert_w0", "load_config",
    "ls_estimate", "mc_rate", "mc_rate_profile", "optimal_phases",
    "rate_upper_bound", "rician_to_m", "rtilde_derivative",
    "rtilde_high_snr", "rtilde_of_k", "sample_channel", "sample_nakagami",
    "simulate_pilots",
]
