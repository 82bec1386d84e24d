"""Frequency-domain channel with CFO/SFO inter-carrier interference.

The per-subcarrier channel is flat Rayleigh: independent CN(0,1) entries,
constant over the T OFDM symbols of one space-time block.  Oscillator
offsets enter through the kernel phi(n, p), the DFT leakage coefficient
from source subcarrier p to destination subcarrier n:

    phi = exp(j*pi*(N-1)/N * x) * sin(pi*x) / (N * sin(pi*x/N))
    x   = cfo_rel + (sfo_rel / N) * e(n) + e((n - p) mod N)

with the index folding e(n) = n for n <= N/2, n - N otherwise.  The kernel
equals the geometric-series average (1/N) sum_k exp(j*2*pi*k*x/N), which is
the brute-force oracle used by the tests.  Rows have unit energy
(sum_p |phi(n,p)|^2 = 1) for any offsets.

The received block is the kernel-weighted superposition of all subcarriers'
codewords through their own channels plus AWGN; the diagonal term is the
useful signal, everything else is ICI.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

INT_TOL = 1e-9  # x this close to an integer takes the limit value


class WindowTooLarge(ValueError):
    pass


def fold_index(n, n_subcarriers: int):
    """Signed subcarrier index: e(n) = n for n <= N/2, n - N otherwise."""
    n = np.asarray(n)
    out = np.where(n <= n_subcarriers // 2, n, n - n_subcarriers)
    return out[()] if out.ndim == 0 else out


def _dirichlet(x, n_subcarriers: int) -> np.ndarray:
    """exp(j*pi*(N-1)/N*x) * sin(pi*x)/(N*sin(pi*x/N)), singularities removed.

    At integer x the kernel is exactly 0 (orthogonal subcarriers) unless x
    is a multiple of N, where the ratio tends to +-1 with sign set by the
    parity of (x/N)*(N-1).
    """
    n = n_subcarriers
    x = np.asarray(x, dtype=float)
    m = np.rint(x)
    near_int = np.abs(x - m) < INT_TOL
    on_peak = near_int & (np.mod(m, n) == 0)
    phase = np.exp(1j * np.pi * (n - 1) / n * x)
    denom = np.where(near_int, 1.0, np.sin(np.pi * x / n))
    ratio = np.where(near_int, 0.0, np.sin(np.pi * x) / (n * denom))
    k_peak = np.rint(m / n)
    peak_sign = np.where(np.mod(k_peak * (n - 1), 2) == 0, 1.0, -1.0)
    ratio = np.where(on_peak, peak_sign, ratio)
    return phase * ratio


def phi(n, p, cfo_rel: float, sfo_rel: float, n_subcarriers: int):
    """ICI kernel phi(n, p) for destination n and source p (vectorized)."""
    n = np.asarray(n)
    p = np.asarray(p)
    big_n = n_subcarriers
    x = (cfo_rel
         + (sfo_rel / big_n) * fold_index(n, big_n)
         + fold_index(np.mod(n - p, big_n), big_n))
    out = _dirichlet(x, big_n)
    return out[()] if out.ndim == 0 else out


def kernel_matrix(n_subcarriers: int, cfo_rel: float, sfo_rel: float,
                  window: int | None = None) -> np.ndarray:
    """Full (N, N) kernel; truncation zeroes couplings beyond +-K bins.

    ``window=None`` keeps the full span.  K must satisfy 0 <= K < N/2
    (K = N/2 would already cover every off-diagonal).
    """
    n = n_subcarriers
    if window is not None and not 0 <= window < n // 2:
        raise WindowTooLarge(f"truncation K={window} must satisfy 0 <= K < N/2")
    idx = np.arange(n)
    mat = phi(idx[:, None], idx[None, :], cfo_rel, sfo_rel, n)
    if window is not None:
        dist = np.abs(fold_index(np.mod(idx[:, None] - idx[None, :], n), n))
        mat = np.where(dist <= window, mat, 0.0)
    return mat


def kernel_diagonal(n_subcarriers: int, cfo_rel: float, sfo_rel: float) -> np.ndarray:
    """phi(n, n) for every subcarrier: the common phase/amplitude distortion."""
    idx = np.arange(n_subcarriers)
    return phi(idx, idx, cfo_rel, sfo_rel, n_subcarriers)


@dataclass(frozen=True)
class IciKernelRow:
    """Leakage into one destination subcarrier from every source."""

    n: int
    coefficients: np.ndarray  # (N,) phi(n, p) over sources p
    phi_nn: complex


def ici_kernel_row(n: int, n_subcarriers: int, cfo_rel: float, sfo_rel: float,
                   window: int | None = None) -> IciKernelRow:
    p = np.arange(n_subcarriers)
    coeff = phi(n, p, cfo_rel, sfo_rel, n_subcarriers)
    if window is not None:
        if not 0 <= window < n_subcarriers // 2:
            raise WindowTooLarge(
                f"truncation K={window} must satisfy 0 <= K < N/2")
        dist = np.abs(fold_index(np.mod(n - p, n_subcarriers), n_subcarriers))
        coeff = np.where(dist <= window, coeff, 0.0)
    return IciKernelRow(n, coeff, complex(coeff[n]))


def truncated_energy_fraction(n_subcarriers: int, cfo_rel: float,
                              sfo_rel: float, window: int,
                              n_probe: int = 8) -> float:
    """Fraction of off-diagonal kernel energy a +-K window captures.

    Probes a few destination subcarriers and returns the worst case; used
    to warn when a truncation would throw away a visible share of the ICI.
    """
    n = n_subcarriers
    probes = np.unique(np.linspace(0, n - 1, n_probe, dtype=int))
    worst = 1.0
    for dest in probes:
        row = ici_kernel_row(int(dest), n, cfo_rel, sfo_rel)
        off = np.abs(row.coefficients) ** 2
        off[dest] = 0.0
        total = off.sum()
        if total <= 0.0:
            continue
        dist = np.abs(fold_index(np.mod(dest - np.arange(n), n), n))
        kept = off[dist <= window].sum()
        worst = min(worst, kept / total)
    return worst


def draw_channel(rng: np.random.Generator, n_subcarriers: int, m_r: int,
                 m_t: int, batch: int | None = None) -> np.ndarray:
    """I.i.d. CN(0,1) channel matrices, (batch, N, m_r, m_t) or (N, m_r, m_t)."""
    shape = (n_subcarriers, m_r, m_t)
    if batch is not None:
        shape = (batch,) + shape
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def apply_channel(x_all: np.ndarray, h_all: np.ndarray, cfo_rel: float,
                  sfo_rel: float, sigma2_real: float,
                  window: int | None = None,
                  rng: np.random.Generator | None = None,
                  kernel: np.ndarray | None = None) -> np.ndarray:
    """Received blocks Y for one ST-OFDM frame (or a batch of frames).

    ``x_all`` is (..., N, M_T, T), ``h_all`` (..., N, M_R, M_T); the result
    is (..., N, M_R, T).  Each destination subcarrier receives the
    kernel-weighted sum of every source subcarrier's codeword through that
    source's channel, scaled by 1/sqrt(M_T), plus complex AWGN with
    ``sigma2_real`` variance per real dimension.  A precomputed ``kernel``
    matrix may be passed to avoid rebuilding it per call.
    """
    x_all = np.asarray(x_all)
    h_all = np.asarray(h_all)
    n = x_all.shape[-3]
    m_t = x_all.shape[-2]
    if kernel is None:
        kernel = kernel_matrix(n, cfo_rel, sfo_rel, window)
    z = (h_all @ x_all) / np.sqrt(m_t)          # per-source received codewords
    y = np.einsum("np,...pjt->...njt", kernel, z)
    if sigma2_real > 0.0:
        if rng is None:
            raise ValueError("rng required when sigma2_real > 0")
        scale = np.sqrt(sigma2_real)
        y = y + scale * (rng.standard_normal(y.shape)
                         + 1j * rng.standard_normal(y.shape))
    return y
