"""Rate-maximizing number of surface elements.

Three routes: the exact unique root of the bound's derivative (bisection,
guaranteed by the sign change and strict concavity), a closed-form
high-SNR expression through the Lambert W function, and an exhaustive
integer search kept as an independent oracle.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .params import SystemParams, derive_gains
from .rate import BoundCoefficients, bound_coeffs, rtilde_from_coeffs

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class KStarResult:
    k_real: float        # unrounded root or formula value
    k_star: int          # integer element count
    method: str          # exact_root | high_snr | brute_force
    r_tilde_at_k: float  # bound value achieved at k_star


def lambert_w0(x: float) -> float:
    """Principal-branch Lambert W for x >= 0, solving w e^w = x.

    Halley iteration from ln(1+x), switched to ln x - ln ln x above e;
    converges to w e^w = x within ~1e-12 relative in a handful of steps.
    """
    if not (x >= 0 and math.isfinite(x)):
        raise PreconditionError(f"Lambert W argument must be >= 0 and finite (got {x})")
    if x == 0.0:
        return 0.0
    w = math.log1p(x)
    if x > math.e:
        w = math.log(x) - math.log(math.log(x))
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        dw = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * (w + 1.0)))
        w -= dw
        if abs(dw) <= 1e-16 * (1.0 + abs(w)):
            break
    return w


def _deriv(coeffs: BoundCoefficients, gamma_bar: float, t_c: int, k):
    q = coeffs.a * k * k + coeffs.b * k + coeffs.c
    s = 1.0 + gamma_bar * q
    return (gamma_bar * (t_c - k - 1.0) * (2.0 * coeffs.a * k + coeffs.b)
            / (_LN2 * t_c * s)) - np.log2(s) / t_c


def rtilde_derivative(params: SystemParams, K: float) -> float:
    """Analytic derivative of the diagonal bound with respect to real K."""
    if not (0 < K < params.t_c - 1):
        raise PreconditionError(f"need 0 < K < t_c - 1 (got K={K}, t_c={params.t_c})")
    coeffs = bound_coeffs(params)
    gains = derive_gains(params)
    return float(_deriv(coeffs, gains.gamma_bar, params.t_c, K))


def _round_to_best(coeffs, gamma_bar, t_c, k_real, tie_eps=1e-6):
    # Nearest integer; when the root sits at the rounding boundary (within
    # solver precision), take whichever neighbor achieves the larger bound.
    k_floor = math.floor(k_real)
    frac = k_real - k_floor
    if abs(frac - 0.5) <= tie_eps:
        lo = rtilde_from_coeffs(coeffs, gamma_bar, t_c, k_floor)
        hi = rtilde_from_coeffs(coeffs, gamma_bar, t_c, k_floor + 1)
        k_star = k_floor if lo >= hi else k_floor + 1
    else:
        k_star = k_floor if frac < 0.5 else k_floor + 1
    return int(min(max(k_star, 1), t_c - 1))


def kstar_exact(params: SystemParams) -> KStarResult:
    """Unique maximizer of the diagonal bound, found by bisection.

    The derivative is positive at 0+ and negative at t_c - 1, and the
    bound is strictly concave over the search interval, so the sign change
    brackets exactly one root. Bisection is run well past the 1e-6
    accuracy the rounding step needs.
    """
    coeffs = bound_coeffs(params)
    gamma_bar = derive_gains(params).gamma_bar
    t_c = params.t_c
    lo, hi = 1e-9, t_c - 1.0 - 1e-9
    f_lo = _deriv(coeffs, gamma_bar, t_c, lo)
    f_hi = _deriv(coeffs, gamma_bar, t_c, hi)
    if not (f_lo > 0 and f_hi < 0):
        raise PreconditionError(
            f"derivative does not change sign on (0, t_c-1): f(0+)={f_lo}, f(t_c-1)={f_hi}")
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if _deriv(coeffs, gamma_bar, t_c, mid) > 0:
            lo = mid
        else:
            hi = mid
    k_real = 0.5 * (lo + hi)
    k_star = _round_to_best(coeffs, gamma_bar, t_c, k_real)
    return KStarResult(k_real=k_real, k_star=k_star, method="exact_root",
                       r_tilde_at_k=float(rtilde_from_coeffs(coeffs, gamma_bar, t_c, k_star)))


def kstar_highsnr(params: SystemParams) -> KStarResult:
    """Closed-form high-SNR element count.

    k_star = floor((t_c - 1) / W(e sqrt(gbar a) (t_c - 1)) + 1/2), kept as
    printed even where comparing both neighbors would differ. Out-of-range
    results are clamped into [1, t_c - 1] with a warning.
    """
    coeffs = bound_coeffs(params)
    gamma_bar = derive_gains(params).gamma_bar
    t_c = params.t_c
    x = math.e * math.sqrt(gamma_bar * coeffs.a) * (t_c - 1)
    k_real = (t_c - 1) / lambert_w0(x)
    k_star = math.floor(k_real + 0.5)
    if not (1 <= k_star <= t_c - 1):
        warnings.warn(
            f"high-SNR formula gave K={k_star}, clamping into [1, {t_c - 1}]",
            stacklevel=2)
        k_star = min(max(k_star, 1), t_c - 1)
    return KStarResult(k_real=k_real, k_star=int(k_star), method="high_snr",
                       r_tilde_at_k=float(rtilde_from_coeffs(coeffs, gamma_bar, t_c, k_star)))


def rtilde_high_snr(params: SystemParams, K: float) -> float:
    """Leading-order bound (1 - (K+1)/t_c) log2(gbar a K^2) used at high SNR."""
    coeffs = bound_coeffs(params)
    gamma_bar = derive_gains(params).gamma_bar
    arg = gamma_bar * coeffs.a * K * K
    if arg < 1.0 - 1e-12:
        raise PreconditionError(
            f"high-SNR form needs gbar*a*K^2 >= 1 (got {arg} at K={K})")
    return (1.0 - (K + 1.0) / params.t_c) * math.log2(max(arg, 1.0))


def kstar_bruteforce(params: SystemParams) -> KStarResult:
    """Exhaustive argmax over integer K in [1, t_c - 1]; ties take smaller K."""
    coeffs = bound_coeffs(params)
    gamma_bar = derive_gains(params).gamma_bar
    ks = np.arange(1, params.t_c, dtype=float)
    vals = rtilde_from_coeffs(coeffs, gamma_bar, params.t_c, ks)
    i = int(np.argmax(vals))
    return KStarResult(k_real=float(ks[i]), k_star=int(ks[i]), method="brute_force",
                       r_tilde_at_k=float(vals[i]))
