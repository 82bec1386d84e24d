"""Gray QAM mapping, soft symbol regeneration and per-axis LLR demapping.

Square constellations only: B bits per symbol split evenly between the I and
Q axes, each axis an independent Gray-labelled PAM alphabet, the whole
constellation scaled to unit average energy.  Detection runs on stacked real
dimensions, so the demapper operates per PAM axis and the two half-labels of
a symbol are re-interleaved into bit order by the caller.

LLR sign convention throughout: LLR > 0 means bit 0 is more likely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LLR_CLIP = 50.0


class LengthMismatch(ValueError):
    pass


class NonPositiveVariance(ValueError):
    pass


@dataclass(frozen=True)
class Constellation:
    """Gray square QAM with precomputed per-axis PAM tables.

    ``levels[k]`` is the amplitude of Gray position k (descending, so the
    all-zeros label sits on the most positive level) and ``labels[k]`` its
    bit label.  ``level_by_value[v]`` inverts the labelling: the amplitude
    whose label equals the integer v (MSB first).
    """

    bits_per_symbol: int
    levels: np.ndarray          # (n_levels,) PAM amplitudes, Gray order
    labels: np.ndarray          # (n_levels, bits_per_axis) 0/1 labels
    level_by_value: np.ndarray  # (n_levels,) amplitude indexed by label value

    @property
    def bits_per_axis(self) -> int:
        return self.bits_per_symbol // 2

    @property
    def n_levels(self) -> int:
        return self.levels.size


def make_constellation(bits_per_symbol: int) -> Constellation:
    if bits_per_symbol % 2 or bits_per_symbol < 2:
        raise ValueError(f"bits_per_symbol must be even and >= 2, "
                         f"got {bits_per_symbol}")
    m = bits_per_symbol // 2
    n = 1 << m
    k = np.arange(n)
    gray = k ^ (k >> 1)                          # label of Gray position k
    labels = (gray[:, None] >> np.arange(m - 1, -1, -1)) & 1
    # unit average symbol energy: two axes, E[a^2] = c^2 (n^2-1)/3 per axis
    scale = np.sqrt(3.0 / (2.0 * (n * n - 1)))
    levels = scale * (n - 1 - 2.0 * k)           # label 0...0 -> most positive
    level_by_value = np.empty(n)
    level_by_value[gray] = levels
    return Constellation(bits_per_symbol, levels, labels.astype(np.int8),
                         level_by_value)


def _bits_to_values(bits: np.ndarray) -> np.ndarray:
    """Pack a trailing axis of bits into integers, MSB first."""
    m = bits.shape[-1]
    weights = 1 << np.arange(m - 1, -1, -1)
    return bits @ weights


def map_bits(bits: np.ndarray, const: Constellation) -> np.ndarray:
    """Map bits (..., n_sym * B) to complex unit-energy Gray QAM symbols."""
    b = const.bits_per_symbol
    bits = np.asarray(bits)
    if bits.shape[-1] % b:
        raise LengthMismatch(
            f"bit count {bits.shape[-1]} not divisible by B={b}")
    grouped = bits.reshape(bits.shape[:-1] + (-1, b))
    i_val = _bits_to_values(grouped[..., : b // 2])
    q_val = _bits_to_values(grouped[..., b // 2:])
    return const.level_by_value[i_val] + 1j * const.level_by_value[q_val]


def _axis_probabilities(llrs: np.ndarray, const: Constellation) -> np.ndarray:
    """Per-level probabilities (..., n_levels) from per-axis bit LLRs."""
    # p(bit=1) = 1 / (1 + e^llr), computed stably
    p1 = 0.5 * (1.0 - np.tanh(0.5 * np.clip(llrs, -LLR_CLIP, LLR_CLIP)))
    probs = np.ones(llrs.shape[:-1] + (const.n_levels,))
    for j in range(const.bits_per_axis):
        bit_one = const.labels[:, j].astype(bool)
        pj = p1[..., j, None]
        probs = probs * np.where(bit_one, pj, 1.0 - pj)
    return probs


def soft_map_axis(llrs: np.ndarray, const: Constellation):
    """Expected PAM value and variance per axis from bit LLRs (..., m)."""
    probs = _axis_probabilities(llrs, const)
    mean = probs @ const.levels
    second = probs @ (const.levels ** 2)
    var = np.maximum(second - mean ** 2, 0.0)
    return mean, var


def soft_map(llrs: np.ndarray, const: Constellation):
    """Soft symbols and per-symbol variances from LLRs (..., n_sym * B).

    Bits are treated as independent with probabilities given by their LLRs;
    the expectation runs over the constellation, axis by axis.  Zero LLRs
    give the symbol 0 with variance 1 (unit-energy constellation), hard
    LLRs reproduce :func:`map_bits` exactly with zero variance.
    """
    b = const.bits_per_symbol
    llrs = np.asarray(llrs, dtype=float)
    if llrs.shape[-1] % b:
        raise LengthMismatch(
            f"LLR count {llrs.shape[-1]} not divisible by B={b}")
    grouped = llrs.reshape(llrs.shape[:-1] + (-1, 2, b // 2))
    mean, var = soft_map_axis(grouped, const)
    symbols = mean[..., 0] + 1j * mean[..., 1]
    variances = var[..., 0] + var[..., 1]
    return symbols, variances


def demap_axis(s_hat: np.ndarray, beta, nu2, priors, const: Constellation,
               clip: float = LLR_CLIP) -> np.ndarray:
    """Extrinsic max-log LLRs for the bits of one real detection axis.

    The equalizer output is modelled as ``s_hat = beta * s + noise(nu2)``
    per real dimension.  ``priors`` (same trailing shape as the output,
    (..., bits_per_axis)) hold a-priori LLRs of the axis bits; each bit's
    own prior is excluded from its metric, so the result is extrinsic.
    """
    s_hat = np.asarray(s_hat, dtype=float)
    beta = np.broadcast_to(np.asarray(beta, dtype=float), s_hat.shape)
    nu2 = np.broadcast_to(np.asarray(nu2, dtype=float), s_hat.shape)
    if np.any(nu2 <= 0.0):
        raise NonPositiveVariance("nu2 must be > 0 for demapping")
    m = const.bits_per_axis
    if priors is None:
        priors = np.zeros(s_hat.shape + (m,))
    else:
        priors = np.asarray(priors, dtype=float)

    # metric per candidate level: Gaussian term plus priors of all bits
    resid = s_hat[..., None] - beta[..., None] * const.levels
    metrics = -(resid ** 2) / (2.0 * nu2[..., None])
    half_sign = 0.5 * (1.0 - 2.0 * const.labels.astype(float))  # (n, m)
    metrics = metrics + priors @ half_sign.T

    big = np.finfo(float).max
    bit_is_one = const.labels.T.astype(bool)                    # (m, n)
    masked0 = np.where(bit_is_one, -big, metrics[..., None, :])
    masked1 = np.where(bit_is_one, metrics[..., None, :], -big)
    app = masked0.max(axis=-1) - masked1.max(axis=-1)
    return np.clip(app - priors, -clip, clip)
