"""Constellation, soft mapper and demapper tests.

Oracles: exhaustive label scans for the Gray property, closed-form QPSK
expectations, and an exact (log-sum-exp) per-axis LLR computation that the
max-log demapper must match up to the max-log gap.
"""

import numpy as np
import pytest

from mimo_ofdm import mapping
from mimo_ofdm.mapping import (Constellation, NonPositiveVariance, demap_axis,
                               make_constellation, map_bits, soft_map,
                               soft_map_axis)


def all_symbols(const: Constellation):
    b = const.bits_per_symbol
    bits = ((np.arange(1 << b)[:, None] >> np.arange(b - 1, -1, -1)) & 1)
    return bits, map_bits(bits.reshape(-1), const)


@pytest.mark.parametrize("b", [2, 4, 6, 8])
def test_unit_energy_and_distinct_points(b):
    const = make_constellation(b)
    _, pts = all_symbols(const)
    assert np.mean(np.abs(pts) ** 2) == pytest.approx(1.0, abs=1e-12)
    assert len(set(np.round(pts, 12))) == 1 << b


@pytest.mark.parametrize("b", [2, 4, 6, 8])
def test_gray_adjacency_on_both_axes(b):
    const = make_constellation(b)
    order = np.argsort(const.levels)
    labels = const.labels[order]
    for i in range(len(labels) - 1):
        assert np.sum(labels[i] != labels[i + 1]) == 1


def test_qpsk_points():
    const = make_constellation(2)
    pts = map_bits(np.array([0, 0, 0, 1, 1, 1, 1, 0]), const) * np.sqrt(2)
    assert np.allclose(pts, [1 + 1j, 1 - 1j, -1 - 1j, -1 + 1j])


def test_map_rejects_ragged_input():
    with pytest.raises(mapping.LengthMismatch):
        map_bits(np.zeros(7, dtype=int), make_constellation(4))


# ---------------------------------------------------------------------------
# soft mapper

def test_soft_map_uniform_prior():
    s, v = soft_map(np.zeros(16), make_constellation(4))
    assert np.allclose(s, 0.0)
    assert np.allclose(v, 1.0)


@pytest.mark.parametrize("b", [2, 4, 8])
def test_soft_map_hard_llrs_reproduce_map(b):
    rng = np.random.default_rng(17)
    const = make_constellation(b)
    bits = rng.integers(0, 2, 12 * b)
    s, v = soft_map((1.0 - 2.0 * bits) * mapping.LLR_CLIP, const)
    assert np.allclose(s, map_bits(bits, const), atol=1e-12)
    assert np.allclose(v, 0.0, atol=1e-12)


def test_soft_map_qpsk_closed_form():
    const = make_constellation(2)
    s, v = soft_map(np.array([2.0, 0.0]), const)
    assert s[0] == pytest.approx(np.tanh(1.0) / np.sqrt(2))
    assert s[0].imag == 0.0
    assert v[0] == pytest.approx(1.0 - np.tanh(1.0) ** 2 / 2)


def test_soft_map_axis_moments_against_enumeration():
    rng = np.random.default_rng(18)
    const = make_constellation(4)
    llrs = rng.standard_normal((5, 2)) * 2
    mean, var = soft_map_axis(llrs, const)
    p1 = 1.0 / (1.0 + np.exp(llrs))
    for i in range(5):
        probs = np.ones(const.n_levels)
        for j in range(2):
            bit = const.labels[:, j]
            probs = probs * np.where(bit, p1[i, j], 1 - p1[i, j])
        assert mean[i] == pytest.approx(probs @ const.levels)
        assert var[i] == pytest.approx(probs @ const.levels ** 2
                                       - (probs @ const.levels) ** 2)


# ---------------------------------------------------------------------------
# demapper

def test_demap_on_point_reproduces_label():
    const = make_constellation(4)
    for k in range(const.n_levels):
        llrs = demap_axis(np.array(const.levels[k]), 1.0, 1e-9, None, const)
        signs = llrs < 0
        assert np.array_equal(signs.astype(int), const.labels[k])
        assert np.all(np.abs(llrs) == mapping.LLR_CLIP)


def test_demap_sign_bit_zero_at_origin():
    # with a symmetric PAM only the sign bit is uninformative at s_hat = 0;
    # amplitude bits legitimately prefer the inner points
    for b in (2, 4, 8):
        const = make_constellation(b)
        llrs = demap_axis(np.array(0.0), 1.0, 0.5, None, const)
        assert llrs[0] == pytest.approx(0.0, abs=1e-12)
        if b == 2:
            assert np.allclose(llrs, 0.0)


def _exact_llrs(s_hat, beta, nu2, priors, const):
    metrics = -(s_hat - beta * const.levels) ** 2 / (2 * nu2)
    metrics = metrics + priors @ (0.5 * (1 - 2 * const.labels.astype(float))).T
    out = np.empty(const.bits_per_axis)
    for j in range(const.bits_per_axis):
        zero = const.labels[:, j] == 0
        m0 = np.log(np.exp(metrics[zero]).sum())
        m1 = np.log(np.exp(metrics[~zero]).sum())
        out[j] = m0 - m1 - priors[j]
    return out


def test_demap_matches_exact_within_maxlog_gap():
    # 4-PAM axis of 16-QAM: max-log result within log(2) of the exact LLR
    const = make_constellation(4)
    rng = np.random.default_rng(19)
    for _ in range(50):
        s_hat = rng.normal(scale=0.6)
        priors = rng.standard_normal(2)
        got = demap_axis(np.array(s_hat), 1.0, 0.5, priors, const)
        exact = _exact_llrs(s_hat, 1.0, 0.5, priors, const)
        assert np.all(np.abs(got - exact) <= np.log(2.0) + 1e-9)


def test_demap_extrinsic_excludes_own_prior():
    const = make_constellation(4)
    base = np.zeros(2)
    ref = demap_axis(np.array(0.37), 1.0, 0.3, base, const)
    for j in range(2):
        bumped = base.copy()
        bumped[j] = 5.0
        got = demap_axis(np.array(0.37), 1.0, 0.3, bumped, const)
        assert got[j] == pytest.approx(ref[j], abs=1e-12)


def test_demap_rejects_nonpositive_variance():
    const = make_constellation(2)
    with pytest.raises(NonPositiveVariance):
        demap_axis(np.array(0.1), 1.0, 0.0, None, const)


def test_demap_then_soft_map_consistency():
    # hard decisions through demap at tiny noise reproduce the symbols
    rng = np.random.default_rng(20)
    const = make_constellation(8)
    bits = rng.integers(0, 2, 40 * 8)
    sym = map_bits(bits, const)
    axes = np.stack([sym.real, sym.imag], axis=-1)
    llrs = demap_axis(axes, 1.0, 1e-6, None, const)
    s, v = soft_map(llrs.reshape(-1), const)
    assert np.allclose(s, sym, atol=1e-9)


def test_clipping_never_changes_sign():
    rng = np.random.default_rng(21)
    const = make_constellation(6)
    s_hat = rng.normal(scale=1.0, size=200)
    clipped = demap_axis(s_hat, 1.0, 1e-4, None, const)
    loose = demap_axis(s_hat, 1.0, 1e-4, None, const, clip=1e9)
    assert np.array_equal(np.sign(clipped), np.sign(loose))
