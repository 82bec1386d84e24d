"""Outer convolutional code: encoder, puncturing, interleaving, SISO decoder.

The mother code is the rate-1/2, constraint-length-7 feedforward code with
octal generators (171, 133), punctured to 2/3 or 3/4 with the standard DVB
patterns.  Frames are zero-tailed (K-1 zero bits drive the register back to
state 0).  The decoder is a max-log BCJR over the code trellis; it returns
extrinsic LLRs for every coded position (a-posteriori minus intrinsic) plus
hard decisions for the information bits, which is exactly the exchange the
iterative receiver needs.

All operations accept a leading batch axis and are vectorized across it;
the trellis recursions loop over time only.

Notes on the trellis layout
---------------------------
State s at step k holds the previous ``mem`` input bits, most recent in the
MSB.  The register value for input b is ``(b << mem) | s``; output bits are
parities of that register masked by each generator.  Every state has exactly
two predecessors, ``(s << 1) & (n_states-1)`` and that value + 1, both
reached with input bit ``s >> (mem-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

NEG_INF = -1.0e30

# DVB puncturing, as a keep-mask over the (x0, y0, x1, y1, ...) output stream
PUNCTURE_MASKS = {
    Fraction(1, 2): (1, 1),
    Fraction(2, 3): (1, 1, 0, 1),
    Fraction(3, 4): (1, 1, 0, 1, 1, 0),
}


class LengthMismatch(ValueError):
    pass


@dataclass
class ConvCode:
    """Feedforward binary convolutional code of rate 1/2 with zero tailing."""

    generators: tuple = (0o171, 0o133)
    constraint_length: int = 7

    def __post_init__(self):
        k = self.constraint_length
        self.mem = k - 1
        self.n_states = 1 << self.mem
        states = np.arange(self.n_states)
        regs = np.array([states, (1 << self.mem) | states])  # (2, S)
        self.out_x = (np.bitwise_count(regs & self.generators[0]) & 1).astype(np.int8)
        self.out_y = (np.bitwise_count(regs & self.generators[1]) & 1).astype(np.int8)
        self.next_state = np.array([(b << (self.mem - 1)) | (states >> 1)
                                    for b in (0, 1)])
        # predecessors: state and branch metric gather indices, see module notes
        ns = states
        prev0 = (ns << 1) & (self.n_states - 1)
        self.prev_state = np.stack([prev0, prev0 | 1], axis=1)     # (S, 2)
        prev_bit = ns >> (self.mem - 1)
        self.pred_gamma_idx = prev_bit[:, None] * self.n_states + self.prev_state
        # half branch metrics per hypothesis: +L/2 for bit 0, -L/2 for bit 1
        self.gx = 0.5 * (1.0 - 2.0 * self.out_x)
        self.gy = 0.5 * (1.0 - 2.0 * self.out_y)
        self.x_is_zero = self.out_x == 0
        self.y_is_zero = self.out_y == 0

    # ------------------------------------------------------------------
    def encode(self, info_bits: np.ndarray) -> np.ndarray:
        """Encode and zero-tail; output is (..., 2*(n_info + mem))."""
        bits = np.atleast_2d(np.asarray(info_bits, dtype=np.int64))
        squeeze = np.asarray(info_bits).ndim == 1
        f, n_info = bits.shape[0], bits.shape[-1]
        steps = n_info + self.mem
        out = np.empty((f, 2 * steps), dtype=np.int8)
        state = np.zeros(f, dtype=np.int64)
        for k in range(steps):
            b = bits[:, k] if k < n_info else np.zeros(f, dtype=np.int64)
            out[:, 2 * k] = self.out_x[b, state]
            out[:, 2 * k + 1] = self.out_y[b, state]
            state = self.next_state[b, state]
        return out[0] if squeeze else out.reshape(
            np.asarray(info_bits).shape[:-1] + (2 * steps,))

    # ------------------------------------------------------------------
    def viterbi(self, coded_llrs: np.ndarray) -> np.ndarray:
        """Hard ML decisions for a zero-tailed frame of coded-bit LLRs."""
        llrs = np.asarray(coded_llrs, dtype=float)
        if llrs.ndim != 1:
            raise LengthMismatch("viterbi decodes one frame at a time")
        steps = llrs.size // 2
        n_info = steps - self.mem
        metric = np.full(self.n_states, NEG_INF)
        metric[0] = 0.0
        survivor = np.empty((steps, self.n_states), dtype=np.int8)
        for k in range(steps):
            g = self.gx * llrs[2 * k] + self.gy * llrs[2 * k + 1]  # (2, S)
            cand = metric[self.prev_state] + g.ravel()[self.pred_gamma_idx]
            survivor[k] = np.argmax(cand, axis=1)
            metric = np.max(cand, axis=1)
            metric -= metric.max()
        path = self._traceback(survivor)
        return path[:n_info]

    def _traceback(self, survivor: np.ndarray) -> np.ndarray:
        steps = survivor.shape[0]
        bits = np.empty(steps, dtype=np.int8)
        state = 0
        for k in range(steps - 1, -1, -1):
            bits[k] = state >> (self.mem - 1)
            state = self.prev_state[state, survivor[k, state]]
        return bits

    # ------------------------------------------------------------------
    def siso_decode(self, coded_llr_prior: np.ndarray):
        """Max-log BCJR: extrinsic LLRs for all coded bits + info decisions.

        ``coded_llr_prior`` is the depunctured frame (..., 2*steps), zeros in
        punctured positions.  Returns ``(extrinsic, info_bits)`` where
        extrinsic has the input's shape and info_bits is (..., steps - mem).
        Extrinsic is a-posteriori minus the input LLR at each position.
        """
        llrs = np.asarray(coded_llr_prior, dtype=float)
        squeeze = llrs.ndim == 1
        llrs2 = np.atleast_2d(llrs.reshape(-1, llrs.shape[-1]))
        ext, info = self._siso_batch(llrs2)
        if squeeze:
            return ext[0], info[0]
        lead = llrs.shape[:-1]
        return ext.reshape(lead + ext.shape[-1:]), info.reshape(lead + info.shape[-1:])

    def _siso_batch(self, llrs: np.ndarray):
        f, width = llrs.shape
        if width % 2:
            raise LengthMismatch("coded LLR frame length must be even")
        steps = width // 2
        n_info = steps - self.mem
        if n_info <= 0:
            raise LengthMismatch("frame shorter than the code tail")
        lx, ly = llrs[:, 0::2], llrs[:, 1::2]

        # forward pass, storing normalized alphas for every step
        alpha = np.empty((steps + 1, f, self.n_states))
        alpha[0] = NEG_INF
        alpha[0, :, 0] = 0.0
        for k in range(steps):
            g = self._gamma(lx[:, k], ly[:, k], tail=k >= n_info)
            cand = (alpha[k][:, self.prev_state]
                    + g.reshape(f, -1)[:, self.pred_gamma_idx])
            np.max(cand, axis=2, out=alpha[k + 1])
            alpha[k + 1] -= alpha[k + 1].max(axis=1, keepdims=True)

        # backward pass with per-step APP extraction
        beta = np.full((f, self.n_states), NEG_INF)
        beta[:, 0] = 0.0
        app = np.empty_like(llrs)
        info_llr = np.empty((f, n_info))
        for k in range(steps - 1, -1, -1):
            g = self._gamma(lx[:, k], ly[:, k], tail=k >= n_info)
            tot = g + beta[:, self.next_state]          # (f, 2, S)
            full = tot + alpha[k][:, None, :]           # transition metrics
            app[:, 2 * k] = (np.max(np.where(self.x_is_zero, full, NEG_INF), axis=(1, 2))
                             - np.max(np.where(self.x_is_zero, NEG_INF, full), axis=(1, 2)))
            app[:, 2 * k + 1] = (np.max(np.where(self.y_is_zero, full, NEG_INF), axis=(1, 2))
                                 - np.max(np.where(self.y_is_zero, NEG_INF, full), axis=(1, 2)))
            if k < n_info:
                info_llr[:, k] = full[:, 0].max(axis=1) - full[:, 1].max(axis=1)
            beta = tot.max(axis=1)
            beta -= beta.max(axis=1, keepdims=True)

        extrinsic = app - llrs
        return extrinsic, (info_llr < 0).astype(np.int8)

    def _gamma(self, lx, ly, tail: bool):
        g = self.gx * lx[:, None, None] + self.gy * ly[:, None, None]
        if tail:
            g[:, 1, :] = NEG_INF  # zero-tail: input bit 1 not allowed
        return g


# ---------------------------------------------------------------------------
# puncturing

def puncture_keep_indices(n_steps: int, rate: Fraction) -> np.ndarray:
    """Indices into the flat (x0, y0, x1, ...) stream kept after puncturing."""
    mask = PUNCTURE_MASKS[Fraction(rate)]
    if (2 * n_steps) % len(mask):
        raise LengthMismatch(
            f"puncture period {len(mask)} does not divide frame of {2 * n_steps}")
    tiled = np.tile(np.asarray(mask, dtype=bool), (2 * n_steps) // len(mask))
    return np.flatnonzero(tiled)


def puncture(coded: np.ndarray, rate: Fraction) -> np.ndarray:
    coded = np.asarray(coded)
    keep = puncture_keep_indices(coded.shape[-1] // 2, rate)
    return coded[..., keep]


def depuncture(llrs: np.ndarray, rate: Fraction, n_steps: int) -> np.ndarray:
    """Scatter punctured-stream LLRs back to full width, zeros elsewhere."""
    llrs = np.asarray(llrs, dtype=float)
    keep = puncture_keep_indices(n_steps, rate)
    if llrs.shape[-1] != keep.size:
        raise LengthMismatch(
            f"expected {keep.size} punctured LLRs, got {llrs.shape[-1]}")
    out = np.zeros(llrs.shape[:-1] + (2 * n_steps,))
    out[..., keep] = llrs
    return out


# ---------------------------------------------------------------------------
# interleaving

def identity_permutation(n: int) -> np.ndarray:
    return np.arange(n)


def random_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(n)


def interleave(frame: np.ndarray, perm: np.ndarray) -> np.ndarray:
    """Permute a frame: output position i carries input position perm[i]."""
    frame = np.asarray(frame)
    if frame.shape[-1] != perm.size:
        raise LengthMismatch(
            f"frame length {frame.shape[-1]} != permutation size {perm.size}")
    return frame[..., perm]


def deinterleave(frame: np.ndarray, perm: np.ndarray) -> np.ndarray:
    frame = np.asarray(frame)
    if frame.shape[-1] != perm.size:
        raise LengthMismatch(
            f"frame length {frame.shape[-1]} != permutation size {perm.size}")
    out = np.empty_like(frame)
    out[..., perm] = frame
    return out
