"""Experiment configuration shared by every other module.

A :class:`SystemConfig` describes one simulated link: antenna counts, OFDM
size, space-time scheme, constellation, code rate, oscillator impairments,
receiver settings and Monte Carlo bookkeeping.  Configs are plain frozen
dataclasses; :func:`validate` fills in the derived quantities (Q, T, L, eta)
and rejects inconsistent requests.  After validation a config is immutable
and safe to share across workers.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from fractions import Fraction

# scheme name -> (Q symbols per block, T symbol durations, L = Q/T)
SCHEME_SHAPES = {
    "alamouti": (2, 2, 1),
    "vblast": (2, 1, 2),
    "golden": (4, 2, 2),
    "hassibi_ld": (4, 2, 2),
}

SUPPORTED_RATES = (Fraction(1, 2), Fraction(2, 3), Fraction(3, 4))
SUPPORTED_BITS = (2, 4, 6, 8)

CSI_MODES = ("equivalent_channel", "channel_only")

# tail bits appended by the zero-terminated convolutional encoder (K=7)
CODE_TAIL_BITS = 6


class ConfigError(ValueError):
    """A configuration was rejected; the message names the offending field."""


class EtaMismatch(ConfigError):
    pass


class UnsupportedScheme(ConfigError):
    pass


class BadDimension(ConfigError):
    pass


@dataclass(frozen=True)
class SystemConfig:
    """Complete description of one simulated transmission experiment."""

    m_t: int = 2
    m_r: int = 2
    n_subcarriers: int = 64
    scheme: str = "alamouti"
    bits_per_symbol: int = 8
    code_rate: Fraction = Fraction(3, 4)
    cfo_rel: float = 0.0            # N * dF * T_s, fraction of carrier spacing
    sfo_rel: float = 0.0            # N * dT / T_s, samples drifted per OFDM symbol
    ici_window: int | None = None   # None = full span, int K = truncated
    csi_mode: str = "equivalent_channel"
    n_iterations: int = 3
    eta_target: float = 6.0         # requested spectral efficiency [b/s/Hz]
    ebn0_grid_db: tuple = (0.0, 4.0, 8.0, 12.0, 16.0, 20.0, 24.0)
    target_bers: tuple = (1e-3, 1e-4)
    seed: int = 20080213
    min_error_events: int = 200
    max_frames: int = 50_000
    # filled by validate(); None until then
    q: int | None = None
    t: int | None = None
    l: int | None = None
    eta: float | None = None

    @property
    def coded_frame_len(self) -> int:
        """Coded bits per frame: one ST-OFDM block across all subcarriers."""
        return self.n_subcarriers * SCHEME_SHAPES[self.scheme][0] * self.bits_per_symbol

    @property
    def info_frame_len(self) -> int:
        """Information bits per frame before zero-tailing."""
        n_info = self.coded_frame_len * self.code_rate - CODE_TAIL_BITS
        return int(n_info)


def validate(config: SystemConfig) -> SystemConfig:
    """Check a raw config and return it with (Q, T, L, eta) filled in.

    Raises :class:`UnsupportedScheme`, :class:`BadDimension` or
    :class:`EtaMismatch`; each message names the offending field.
    """
    if config.scheme not in SCHEME_SHAPES:
        raise UnsupportedScheme(
            f"scheme: {config.scheme!r} is not one of {sorted(SCHEME_SHAPES)}")
    q, t, l = SCHEME_SHAPES[config.scheme]

    if config.m_t < 1 or config.m_r < 1:
        raise BadDimension(f"m_t/m_r: antenna counts must be >= 1, "
                           f"got ({config.m_t}, {config.m_r})")
    if config.m_t != 2:
        raise UnsupportedScheme(
            f"m_t: scheme {config.scheme!r} is defined for m_t=2, got {config.m_t}")

    n = config.n_subcarriers
    if n < 2 or (n & (n - 1)) != 0:
        raise BadDimension(f"n_subcarriers: must be a power of two >= 2, got {n}")

    if config.bits_per_symbol not in SUPPORTED_BITS:
        raise BadDimension(
            f"bits_per_symbol: must be one of {SUPPORTED_BITS}, "
            f"got {config.bits_per_symbol}")

    rate = Fraction(config.code_rate)
    if rate not in SUPPORTED_RATES:
        raise BadDimension(f"code_rate: must be one of 1/2, 2/3, 3/4, got {rate}")

    if abs(config.sfo_rel) > 1.0:
        raise BadDimension(
            f"sfo_rel: |SFO| may not exceed one sample per OFDM symbol, "
            f"got {config.sfo_rel}")

    if config.ici_window is not None:
        k = config.ici_window
        if k < 0 or k >= n // 2:
            raise BadDimension(
                f"ici_window: truncation K must satisfy 0 <= K < N/2, got {k}")

    if config.csi_mode not in CSI_MODES:
        raise BadDimension(f"csi_mode: must be one of {CSI_MODES}, "
                           f"got {config.csi_mode!r}")

    if config.n_iterations < 1:
        raise BadDimension(f"n_iterations: must be >= 1, got {config.n_iterations}")
    if config.min_error_events < 1 or config.max_frames < 1:
        raise BadDimension("min_error_events/max_frames: must be >= 1")

    eta = Fraction(config.bits_per_symbol) * rate * l
    if eta != Fraction(config.eta_target).limit_denominator(10**6):
        raise EtaMismatch(
            f"bits_per_symbol/code_rate: spectral efficiency B*R*L = {float(eta)} "
            f"does not match eta_target = {config.eta_target}")

    # the coded frame must split evenly into info bits plus the zero tail
    coded = n * q * config.bits_per_symbol
    n_info = coded * rate - CODE_TAIL_BITS
    if n_info.denominator != 1 or n_info <= 0:
        raise BadDimension(
            f"n_subcarriers: coded frame of {coded} bits at rate {rate} does not "
            f"leave an integral positive number of info bits")
    period = 2 * rate.denominator  # encoder steps per puncture period, *2 outputs
    if (2 * (int(n_info) + CODE_TAIL_BITS)) % period != 0:
        raise BadDimension(
            f"n_subcarriers: puncture pattern period {period} does not divide "
            f"the tailed frame")

    return dataclasses.replace(config, code_rate=rate, q=q, t=t, l=l, eta=float(eta))


def bits_for_eta(scheme: str, code_rate, eta_target: float = 6.0) -> int:
    """Constellation size B that hits ``eta_target`` for a scheme and rate."""
    if scheme not in SCHEME_SHAPES:
        raise UnsupportedScheme(f"scheme: {scheme!r}")
    l = SCHEME_SHAPES[scheme][2]
    b = Fraction(eta_target).limit_denominator(10**6) / (Fraction(code_rate) * l)
    if b.denominator != 1 or int(b) not in SUPPORTED_BITS:
        raise EtaMismatch(
            f"eta_target: no supported constellation gives eta={eta_target} "
            f"for {scheme} at rate {code_rate} (needs B={float(b)})")
    return int(b)


def noise_variance_per_real_dim(eta_bits: float, ebn0_db: float) -> float:
    """Noise variance per real dimension for a given Eb/N0.

    With unit-energy constellations, E||X||_F^2 = Q block normalization and
    the 1/sqrt(M_T) transmit scaling applied in the channel, eta = L*B*R
    information bits ride on each subcarrier per channel use, so
    N0 = 1 / (eta * 10^(Eb/N0 / 10)) and each real noise dimension gets N0/2.
    """
    return 1.0 / (2.0 * eta_bits * 10.0 ** (ebn0_db / 10.0))


def derived_noise_variance(config: SystemConfig, ebn0_db: float) -> float:
    """Per-real-dimension noise variance for a validated config at ``ebn0_db``."""
    eta = config.l * config.bits_per_symbol * float(config.code_rate)
    return noise_variance_per_real_dim(eta, ebn0_db)


# ---------------------------------------------------------------------------
# serialization

_SERIALIZED_FIELDS = [f.name for f in dataclasses.fields(SystemConfig)
                      if f.name not in ("q", "t", "l", "eta")]


def render(config: SystemConfig) -> str:
    """Serialize to a JSON document (derived fields are recomputed on parse)."""
    out = {}
    for name in _SERIALIZED_FIELDS:
        value = getattr(config, name)
        if isinstance(value, Fraction):
            value = f"{value.numerator}/{value.denominator}"
        elif isinstance(value, tuple):
            value = list(value)
        out[name] = value
    return json.dumps(out, indent=2)


def parse(text: str, overrides: dict | None = None) -> SystemConfig:
    """Parse a JSON config document and validate it.

    ``overrides`` maps field names to raw values (already typed or strings,
    as produced by :func:`parse_override`); they are applied before
    validation.
    """
    raw = json.loads(text)
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    if overrides:
        raw.update(overrides)
    known = set(_SERIALIZED_FIELDS)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"config: unknown fields {sorted(unknown)}")
    kwargs = {}
    for name, value in raw.items():
        kwargs[name] = _coerce_field(name, value)
    return validate(SystemConfig(**kwargs))


def _coerce_field(name: str, value):
    if name == "code_rate":
        if isinstance(value, str):
            num, _, den = value.partition("/")
            return Fraction(int(num), int(den or 1))
        return Fraction(value)
    if name == "ici_window":
        if value in (None, "full"):
            return None
        return int(value)
    if name in ("ebn0_grid_db", "target_bers"):
        return tuple(float(v) for v in value)
    if name in ("cfo_rel", "sfo_rel", "eta_target"):
        return float(value)
    if name in ("scheme", "csi_mode"):
        return str(value)
    return int(value)


def parse_override(item: str) -> tuple[str, object]:
    """Turn a ``key=value`` CLI override into a (field, value) pair."""
    key, sep, value = item.partition("=")
    if not sep:
        raise ConfigError(f"--set: expected key=value, got {item!r}")
    key = key.strip()
    if key not in _SERIALIZED_FIELDS:
        raise ConfigError(f"--set: unknown field {key!r}")
    if key in ("ebn0_grid_db", "target_bers"):
        return key, [float(v) for v in value.split(",") if v]
    return key, _coerce_field(key, _maybe_number(value))


def _maybe_number(text: str):
    text = text.strip()
    if text.lower() in ("none", "full"):
        return None if text.lower() == "none" else "full"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text
