"""Iterative detector/decoder: MMSE first pass, then soft PIC exchanges.

Detection runs independently per subcarrier on the stacked real model
V = G_eq S + w.  The first iteration applies the MMSE filter

    S_u = g_u' (G_eq G_eq' + sigma2 I)^-1 V

with per-dimension bias beta_u = g_u' (...)^-1 g_u and the exact residual
variance of that filter output (interference plus propagated noise).
Later iterations cancel every interfering dimension with the decoder's soft
symbol estimates and matched-filter the residual (bias 1, variance from the
propagated noise plus leftover soft-feedback uncertainty).  The demapper
and the SISO decoder exchange extrinsic LLRs through the frame interleaver;
the iteration count is fixed by the config.

The receiver never models ICI: the equivalent channel is at most
phi(n, n) H[n] (csi_mode "equivalent_channel"), or H[n] alone when the
receiver is denied the kernel diagonal ("channel_only").
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import coding, mapping, stbc
from .config import SystemConfig

S_BAR2 = 0.5         # symbol power per real dimension, unit-energy complex
NU2_FLOOR = 1e-30    # keeps the demapper's Gaussian metric finite


class SingularMatrix(np.linalg.LinAlgError):
    pass


class ZeroColumn(ValueError):
    pass


@dataclass
class DetectionContext:
    """Per-subcarrier real detection model, shared by all iterations."""

    g_eq: np.ndarray        # (..., N, 2*m_r*T, 2*Q)
    v: np.ndarray           # (..., N, 2*m_r*T)
    sigma2_real: float
    _gram: np.ndarray | None = field(default=None, repr=False)

    @property
    def gram(self) -> np.ndarray:
        if self._gram is None:
            self._gram = self.g_eq.swapaxes(-1, -2) @ self.g_eq
        return self._gram


def build_detection_context(y: np.ndarray, h: np.ndarray, phi_nn: np.ndarray,
                            disp: stbc.DispersionMatrix, csi_mode: str,
                            sigma2_real: float) -> DetectionContext:
    """Stack received blocks and the known channel into the real model.

    ``y`` is (..., N, M_R, T), ``h`` (..., N, M_R, M_T) and ``phi_nn`` (N,).
    With csi_mode "equivalent_channel" the kernel diagonal is folded into
    the channel before stacking; "channel_only" ignores it.  ICI is never
    part of the model.  The 1/sqrt(M_T) transmit scaling is included so
    that G_eq matches the channel output scale.
    """
    h = np.asarray(h)
    if csi_mode == "equivalent_channel":
        h_eff = phi_nn[..., :, None, None] * h
    elif csi_mode == "channel_only":
        h_eff = h
    else:
        raise ValueError(f"unknown csi_mode {csi_mode!r}")
    g_eq = stbc.stack_channel(h_eff, disp) / np.sqrt(disp.m_t)
    v = stbc.stack_complex(np.asarray(y))
    return DetectionContext(g_eq, v, float(sigma2_real))


def mmse_detect(ctx: DetectionContext):
    """First-iteration MMSE estimates: (s_hat, beta, nu2), each (..., 2Q)."""
    g = ctx.g_eq
    rows = g.shape[-2]
    a = g @ g.swapaxes(-1, -2)
    idx = np.arange(rows)
    a[..., idx, idx] += ctx.sigma2_real
    if ctx.sigma2_real == 0.0:
        ranks = np.linalg.matrix_rank(a)
        if np.any(ranks < rows):
            raise SingularMatrix(
                "G_eq G_eq' is rank deficient and sigma2_real is 0; "
                "refusing to regularize silently")
    try:
        w = np.linalg.solve(a, g)
    except np.linalg.LinAlgError as err:
        raise SingularMatrix(str(err)) from err
    s_hat = np.einsum("...ru,...r->...u", w, ctx.v)
    beta = np.einsum("...ru,...ru->...u", g, w)
    # exact conditional variance of this filter's output: the filter is the
    # unit-symbol-power MMSE form, so beta(1-beta)*s2 alone would drop the
    # propagated-noise share; keeping it calibrates the demapper's LLRs
    w_norm2 = np.einsum("...ru,...ru->...u", w, w)
    nu2 = (S_BAR2 * beta * (1.0 - beta)
           + (1.0 - S_BAR2) * ctx.sigma2_real * w_norm2)
    return s_hat, beta, np.maximum(nu2, NU2_FLOOR)


def pic_detect(ctx: DetectionContext, s_soft: np.ndarray, s_var: np.ndarray):
    """Soft parallel interference cancellation plus inverse filtering.

    For each real dimension u the soft estimates of every other dimension
    are cancelled from V and the residual is matched-filtered:
    s_hat_u = g_u' (V - sum_{v != u} g_v s_soft_v) / (g_u' g_u).  Returns
    (s_hat, beta, nu2) with beta identically 1 and nu2 the propagated noise
    plus residual-interference variance.
    """
    g = ctx.g_eq
    gram = ctx.gram
    cols = g.shape[-1]
    idx = np.arange(cols)
    c = gram[..., idx, idx]
    if np.any(c == 0.0):
        raise ZeroColumn("G_eq has an all-zero column")
    resid = ctx.v - np.einsum("...ru,...u->...r", g, s_soft)
    corr = np.einsum("...ru,...r->...u", g, resid)
    s_hat = s_soft + corr / c
    cross2 = gram ** 2
    cross2[..., idx, idx] = 0.0
    interf = np.einsum("...uv,...v->...u", cross2, s_var)
    nu2 = np.maximum(ctx.sigma2_real / c + interf / (c * c), NU2_FLOOR)
    return s_hat, np.ones_like(s_hat), nu2


@dataclass
class IterationTrace:
    """Receiver state after one detector/decoder exchange."""

    iteration: int
    s_hat: np.ndarray            # per-dimension detector estimates
    extrinsic_llrs: np.ndarray   # post-decoder extrinsic, coded positions
    info_bits: np.ndarray
    bit_errors: int | None = None
    ber: float | None = None


def iterate_receive(y: np.ndarray, h: np.ndarray, phi_nn: np.ndarray,
                    config: SystemConfig, disp: stbc.DispersionMatrix,
                    interleaver: np.ndarray, sigma2_real: float,
                    true_bits: np.ndarray | None = None,
                    code: coding.ConvCode | None = None,
                    const: mapping.Constellation | None = None):
    """Run the full iterative receiver on one frame (or a frame batch).

    ``y`` is (N, M_R, T) or (F, N, M_R, T); returns (info_bits, traces)
    where traces holds one :class:`IterationTrace` per iteration, in order.
    Iteration 1 is MMSE, iterations 2..n_iterations are PIC with soft
    feedback regenerated from the decoder's extrinsic output.
    """
    if sigma2_real <= 0.0:
        raise ValueError("iterate_receive needs sigma2_real > 0")
    y = np.asarray(y)
    squeeze = y.ndim == 3
    if squeeze:
        y = y[None]
        h = np.asarray(h)[None]
        if true_bits is not None:
            true_bits = np.asarray(true_bits)[None]
    code = code or coding.ConvCode()
    const = const or mapping.make_constellation(config.bits_per_symbol)

    n, q, b = config.n_subcarriers, config.q, config.bits_per_symbol
    f_frames = y.shape[0]
    n_steps = config.info_frame_len + code.mem
    keep = coding.puncture_keep_indices(n_steps, config.code_rate)

    ctx = build_detection_context(y, h, phi_nn, disp, config.csi_mode,
                                  sigma2_real)
    traces: list[IterationTrace] = []
    fb_mean = fb_var = None

    for iteration in range(1, config.n_iterations + 1):
        if iteration == 1:
            s_hat, beta, nu2 = mmse_detect(ctx)
        else:
            s_hat, beta, nu2 = pic_detect(ctx, fb_mean, fb_var)

        # the PIC mean is already free of the own-symbol prior, so the
        # demapper runs prior-less; feeding the decoder LLRs back into the
        # metric would recount them and lets feedback errors self-amplify
        llr_det = mapping.demap_axis(
            s_hat.reshape(f_frames, n, q, 2),
            beta.reshape(f_frames, n, q, 2),
            nu2.reshape(f_frames, n, q, 2),
            None, const)
        llr_det = llr_det.reshape(f_frames, n * q * b)

        deint = coding.deinterleave(llr_det, interleaver)
        depunct = coding.depuncture(deint, config.code_rate, n_steps)
        extrinsic, info_bits = code.siso_decode(depunct)

        errors = ber = None
        if true_bits is not None:
            errors = int(np.sum(info_bits != true_bits))
            ber = errors / true_bits.size
        traces.append(IterationTrace(iteration, s_hat, extrinsic, info_bits,
                                     errors, ber))

        if iteration < config.n_iterations:
            # cancellation wants the decoder's best symbol beliefs, so the
            # soft mapper gets full a-posteriori LLRs; the PIC mean is
            # algebraically independent of a dimension's own feedback, and
            # extrinsic-only feedback makes the matched filter diverge in
            # exactly the waterfall region the iterations are meant to win
            app = extrinsic + depunct
            feedback = coding.interleave(app[..., keep], interleaver)
            fb_axes = feedback.reshape(f_frames, n, q, 2, b // 2)
            mean_ax, var_ax = mapping.soft_map_axis(fb_axes, const)
            fb_mean = mean_ax.reshape(f_frames, n, 2 * q)
            fb_var = var_ax.reshape(f_frames, n, 2 * q)

    info_bits = traces[-1].info_bits
    if squeeze:
        info_bits = info_bits[0]
        for tr in traces:
            tr.s_hat = tr.s_hat[0]
            tr.extrinsic_llrs = tr.extrinsic_llrs[0]
            tr.info_bits = tr.info_bits[0]
    return info_bits, traces
