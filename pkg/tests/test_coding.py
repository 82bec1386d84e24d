"""Encoder, puncturing, interleaver and SISO decoder tests.

The encoder oracle is an independent shift-register implementation written
directly from the octal taps; the SISO oracle is brute-force enumeration of
all codewords of a toy constraint-length-3 code.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from mimo_ofdm import coding
from mimo_ofdm.coding import ConvCode, deinterleave, depuncture, interleave, puncture


def reference_encode(bits):
    """Straight shift-register encoder for (171, 133)_8, zero-tailed."""
    reg = [0] * 6
    out = []
    for b in list(bits) + [0] * 6:
        window = [b] + reg
        x = window[0] ^ window[1] ^ window[2] ^ window[3] ^ window[6]
        y = window[0] ^ window[2] ^ window[3] ^ window[5] ^ window[6]
        out += [x, y]
        reg = window[:6]
    return np.array(out, dtype=np.int8)


@pytest.fixture(scope="module")
def code():
    return ConvCode()


def test_all_zero_maps_to_all_zero(code):
    assert not code.encode(np.zeros(40, dtype=int)).any()


def test_reference_pattern(code):
    bits = np.array([1, 0, 1, 1, 0, 0, 0, 0])
    # frozen from the independent shift-register encoder above
    expected = np.array([1, 1, 1, 0, 0, 0, 1, 0, 0, 1, 0, 1, 0, 0, 0, 1,
                         1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0])
    assert np.array_equal(code.encode(bits), expected)
    assert np.array_equal(code.encode(bits), reference_encode(bits))


def test_matches_reference_on_random_frames(code):
    rng = np.random.default_rng(3)
    for _ in range(20):
        bits = rng.integers(0, 2, rng.integers(10, 200))
        assert np.array_equal(code.encode(bits), reference_encode(bits))


def test_encoder_linearity(code):
    rng = np.random.default_rng(4)
    a = rng.integers(0, 2, 120)
    b = rng.integers(0, 2, 120)
    assert np.array_equal(code.encode(a ^ b), code.encode(a) ^ code.encode(b))


def test_noiseless_viterbi_round_trip(code):
    rng = np.random.default_rng(5)
    info = rng.integers(0, 2, 200)
    llrs = (1.0 - 2.0 * code.encode(info)) * 4.0
    assert np.array_equal(code.viterbi(llrs), info)


def test_bcjr_noiseless_and_agrees_with_viterbi(code):
    rng = np.random.default_rng(6)
    info = rng.integers(0, 2, 150)
    llrs = (1.0 - 2.0 * code.encode(info)) * 6.0
    _, decisions = code.siso_decode(llrs)
    assert np.array_equal(decisions, info)
    assert np.array_equal(code.viterbi(llrs), decisions)


def test_zero_in_zero_out(code):
    extrinsic, _ = code.siso_decode(np.zeros(2 * 56))
    assert np.abs(extrinsic).max() == 0.0


def test_flipped_high_confidence_bit_corrected(code):
    rng = np.random.default_rng(7)
    info = rng.integers(0, 2, 300)
    llrs = (1.0 - 2.0 * code.encode(info)) * 10.0
    llrs[137] = -llrs[137]
    _, decisions = code.siso_decode(llrs)
    assert np.array_equal(decisions, info)


def test_siso_batched_matches_sequential(code):
    rng = np.random.default_rng(8)
    frames = rng.standard_normal((5, 2 * 46)) * 3
    ext_b, dec_b = code.siso_decode(frames)
    for i in range(5):
        ext_i, dec_i = code.siso_decode(frames[i])
        assert np.allclose(ext_b[i], ext_i)
        assert np.array_equal(dec_b[i], dec_i)


# ---------------------------------------------------------------------------
# brute-force oracle on a toy K=3 code: enumerate every codeword and compute
# exact max-log quantities from the codeword list

TOY = ConvCode(generators=(0o7, 0o5), constraint_length=3)


def _toy_codebook(n_info):
    words = []
    for bits in itertools.product((0, 1), repeat=n_info):
        words.append((np.array(bits), TOY.encode(np.array(bits))))
    return words


def _brute_maxlog_extrinsic(llrs, n_info):
    words = _toy_codebook(n_info)
    metrics = np.array([np.sum((1 - 2 * cw) * llrs) / 2 for _, cw in words])
    ext = np.zeros_like(llrs)
    for pos in range(llrs.size):
        m0 = max(metrics[i] for i, (_, cw) in enumerate(words) if cw[pos] == 0)
        m1 = max(metrics[i] for i, (_, cw) in enumerate(words) if cw[pos] == 1)
        ext[pos] = (m0 - m1) - llrs[pos]
    return ext


def test_siso_extrinsic_matches_codeword_enumeration():
    rng = np.random.default_rng(9)
    for _ in range(10):
        llrs = rng.standard_normal(2 * 8) * 2.0
        ext, _ = TOY.siso_decode(llrs)
        brute = _brute_maxlog_extrinsic(llrs, 8 - TOY.mem)
        assert np.allclose(ext, brute, atol=1e-9)


def test_extrinsic_invariant_to_own_prior():
    rng = np.random.default_rng(10)
    llrs = rng.standard_normal(2 * 9) * 1.5
    pos = 7
    ext_ref, _ = TOY.siso_decode(llrs)
    for delta in (-3.0, 2.0, 11.0):
        bumped = llrs.copy()
        bumped[pos] += delta
        ext, _ = TOY.siso_decode(bumped)
        assert ext[pos] == pytest.approx(ext_ref[pos], abs=1e-9)


# ---------------------------------------------------------------------------
# puncturing and interleaving

@pytest.mark.parametrize("rate,period", [(Fraction(1, 2), 2),
                                         (Fraction(2, 3), 4),
                                         (Fraction(3, 4), 6)])
def test_puncture_lengths(code, rate, period):
    n_info = 30
    coded = code.encode(np.zeros(n_info, dtype=int))
    kept = puncture(coded, rate)
    assert kept.size == (n_info + 6) / rate


def test_depuncture_inverts_puncture(code):
    rng = np.random.default_rng(11)
    info = rng.integers(0, 2, 42)
    coded = code.encode(info)
    n_steps = info.size + 6
    for rate in (Fraction(1, 2), Fraction(2, 3), Fraction(3, 4)):
        kept = puncture(coded, rate)
        restored = depuncture(1.0 - 2.0 * kept, rate, n_steps)
        keep_idx = coding.puncture_keep_indices(n_steps, rate)
        assert np.array_equal(restored[keep_idx], 1.0 - 2.0 * kept)
        mask = np.ones(2 * n_steps, dtype=bool)
        mask[keep_idx] = False
        assert not restored[mask].any()


def test_punctured_rates_still_decode_noiselessly(code):
    rng = np.random.default_rng(12)
    for rate in (Fraction(2, 3), Fraction(3, 4)):
        info = rng.integers(0, 2, 114)
        kept = puncture(code.encode(info), rate)
        llrs = depuncture((1.0 - 2.0 * kept) * 8.0, rate, info.size + 6)
        _, decisions = code.siso_decode(llrs)
        assert np.array_equal(decisions, info)


def test_interleaver_round_trip():
    rng = np.random.default_rng(13)
    perm = coding.random_permutation(97, rng)
    x = rng.standard_normal((4, 97))
    assert np.allclose(deinterleave(interleave(x, perm), perm), x)


def test_identity_permutation_is_noop():
    x = np.arange(24.0)
    perm = coding.identity_permutation(24)
    assert np.array_equal(interleave(x, perm), x)


def test_distinct_seeds_distinct_permutations():
    p1 = coding.random_permutation(256, np.random.default_rng(1))
    p2 = coding.random_permutation(256, np.random.default_rng(2))
    assert not np.array_equal(p1, p2)


def test_length_mismatch_raises():
    with pytest.raises(coding.LengthMismatch):
        interleave(np.zeros(5), np.arange(6))
    with pytest.raises(coding.LengthMismatch):
        deinterleave(np.zeros(7), np.arange(6))
