"""System parameters, unit conversions, and derived large-scale link gains.

Power conventions: transmit powers are given in dB relative to 1 W (dBW),
the noise power in dB relative to 1 mW (dBm). The same noise variance is
used for the pilot and the data phase.
"""

import math
from dataclasses import dataclass, fields, asdict

from .errors import ConfigError


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class SystemParams:
    """All statistical and system inputs of one simulation setup.

    Immutable after construction; safe to share across worker threads.
    Defaults describe the baseline scenario used throughout: a 60 m direct
    hop with a surface placed 50 m from the source and 5 m from the
    destination, severe fading (m = 0.5) on all links.
    """

    p_data_dbw: float = 0.0      # data transmit power, dB re 1 W
    p_pilot_dbw: float = 0.0     # pilot transmit power, dB re 1 W
    noise_dbm: float = -80.0     # noise power, dB re 1 mW (both phases)
    t_c: int = 196               # coherence block length, symbols
    d1_m: float = 50.0           # source to surface distance, m
    d2_m: float = 5.0            # surface to destination distance, m
    d3_m: float = 60.0           # source to destination distance, m
    alpha_direct: float = 3.5    # path-loss exponent, direct link
    alpha_cascade: float = 2.0   # path-loss exponent, cascaded link
    c0_db: float = -30.0         # reference path loss at 1 m, dB
    m1: float = 0.5              # Nakagami parameter, source-surface
    m2: float = 0.5              # Nakagami parameter, surface-destination
    m3: float = 0.5              # Nakagami parameter, direct link
    n_trials: int = 10000        # Monte-Carlo trials
    seed: int = 12345            # root RNG seed, 64-bit unsigned

    def __post_init__(self):
        if not isinstance(self.t_c, int) or self.t_c < 3:
            raise ConfigError(f"t_c must be an integer >= 3 (got {self.t_c})")
        for name in ("m1", "m2", "m3"):
            m = getattr(self, name)
            if not (m >= 0.5 and math.isfinite(m)):
                raise ConfigError(f"{name} must be >= 0.5 (got {m})")
        for name in ("d1_m", "d2_m", "d3_m"):
            d = getattr(self, name)
            if not (d > 0 and math.isfinite(d)):
                raise ConfigError(f"{name} must be > 0 (got {d})")
        for name in ("alpha_direct", "alpha_cascade"):
            a = getattr(self, name)
            if not (a > 0 and math.isfinite(a)):
                raise ConfigError(f"{name} must be > 0 (got {a})")
        for name in ("p_data_dbw", "p_pilot_dbw", "noise_dbm", "c0_db"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if not isinstance(self.n_trials, int) or self.n_trials < 1:
            raise ConfigError(f"n_trials must be a positive integer (got {self.n_trials})")
        if not isinstance(self.seed, int) or not (0 <= self.seed < 2 ** 64):
            raise ConfigError(f"seed must be a 64-bit unsigned integer (got {self.seed})")

    def noise_w(self) -> float:
        """Noise power sigma^2 in Watts."""
        return dbm_to_watts(self.noise_dbm)

    def p_data_w(self) -> float:
        return db_to_linear(self.p_data_dbw)

    def p_pilot_w(self) -> float:
        return db_to_linear(self.p_pilot_dbw)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LinkGains:
    """Linear large-scale gains and transmit SNRs of one parameter set."""

    beta_d: float      # direct-link large-scale gain
    beta_l: float      # cascaded-link large-scale gain
    gamma_bar: float   # data transmit SNR, P / sigma^2
    gamma_tr: float    # pilot transmit SNR, P_tr / sigma^2

    def __post_init__(self):
        for name in ("beta_d", "beta_l", "gamma_bar", "gamma_tr"):
            x = getattr(self, name)
            if not (x > 0 and math.isfinite(x)):
                raise ConfigError(f"{name} must be positive and finite (got {x})")


def derive_gains(params: SystemParams) -> LinkGains:
    """Compute linear link gains from distances, exponents and powers.

    The cascaded link applies the 1 m reference loss on each hop:
    beta_l = C0^2 * (d1 * d2)^(-alpha_cascade).
    """
    c0 = db_to_linear(params.c0_db)
    beta_d = c0 * params.d3_m ** (-params.alpha_direct)
    beta_l = c0 ** 2 * (params.d1_m * params.d2_m) ** (-params.alpha_cascade)
    sigma_sq = params.noise_w()
    return LinkGains(
        beta_d=beta_d,
        beta_l=beta_l,
        gamma_bar=params.p_data_w() / sigma_sq,
        gamma_tr=params.p_pilot_w() / sigma_sq,
    )


_INT_FIELDS = {"t_c", "n_trials", "seed"}
CONFIG_KEYS = tuple(f.name for f in fields(SystemParams))


def _coerce(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _INT_FIELDS:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        kind = "integer" if key in _INT_FIELDS else "number"
        raise ConfigError(f"field {key}: expected {kind}, got {raw!r}") from exc


def parse_overrides(pairs, base: dict | None = None) -> dict:
    """Turn 'key=value' strings into typed field values.

    Unknown keys are rejected by name so typos never silently fall back
    to defaults.
    """
    out = dict(base) if base else {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"expected key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown parameter {key!r} (known: {', '.join(CONFIG_KEYS)})")
        out[key] = _coerce(key, raw)
    return out


def load_config(path, overrides: dict | None = None) -> SystemParams:
    """Read a flat key = value config file into SystemParams.

    Blank lines and '#' comments are ignored. Missing keys take the
    documented defaults; `overrides` (already typed) wins over file values.
    """
    values: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
                key, raw = line.split("=", 1)
                key = key.strip()
                if key not in CONFIG_KEYS:
                    raise ConfigError(f"{path}:{lineno}: unknown parameter {key!r}")
                values[key] = _coerce(key, raw)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if overrides:
        values.update(overrides)
    return SystemParams(**values)
