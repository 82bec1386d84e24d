"""Space-time block codes as dispersion matrices over stacked real symbols.

Every scheme is a linear map from Q complex symbols to an (M_T x T) codeword
X.  Separating real and imaginary parts turns the map into a real matrix F
of shape (2*M_T*T, 2*Q) with X = unstack(F @ stack(S)), and turns the MIMO
channel into a real block matrix G built from 2x2 rotation-scaling blocks,
so that stack(H @ X) = G @ F @ stack(S) for every symbol vector.  That
stacking identity is the module's master property and is what detection
relies on.

Stacking order: antennas outermost, then the T symbol slots, then (real,
imag) for each complex entry.  For the symbol vector itself the real part
of s_q lands on dimension 2q and the imaginary part on 2q+1.

F is normalized so that unit-energy symbols give E||X||_F^2 = Q, one unit
of energy per complex symbol carried.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SCHEME_SHAPES

_GOLDEN_THETA = (1.0 + np.sqrt(5.0)) / 2.0
_GOLDEN_THETA_BAR = (1.0 - np.sqrt(5.0)) / 2.0
_GOLDEN_ALPHA = 1.0 + 1j * (1.0 - _GOLDEN_THETA)
_GOLDEN_ALPHA_BAR = 1.0 + 1j * (1.0 - _GOLDEN_THETA_BAR)


class UnsupportedScheme(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


def _alamouti(s):
    # classic orthogonal design: column t=2 carries (-s2*, s1*)
    return np.array([[s[0], -np.conj(s[1])],
                     [s[1], np.conj(s[0])]])


def _vblast(s):
    # plain spatial multiplexing, one symbol per antenna, T=1
    return np.array([[s[0]],
                     [s[1]]])


def _golden(s):
    # Belfiore/Rekaya/Viterbo full-rate 2x2 code, theta the golden ratio
    a, b, c, d = s
    return (1.0 / np.sqrt(5.0)) * np.array(
        [[_GOLDEN_ALPHA * (a + b * _GOLDEN_THETA),
          _GOLDEN_ALPHA * (c + d * _GOLDEN_THETA)],
         [1j * _GOLDEN_ALPHA_BAR * (c + d * _GOLDEN_THETA_BAR),
          _GOLDEN_ALPHA_BAR * (a + b * _GOLDEN_THETA_BAR)]])


def _hassibi_ld(s):
    # rate-2 linear dispersion example code for M_T = T = 2, Q = 4
    a, b, c, d = s
    return (1.0 / np.sqrt(2.0)) * np.array([[a + c, b + d],
                                            [b - d, a - c]])


_ENCODERS = {
    "alamouti": _alamouti,
    "vblast": _vblast,
    "golden": _golden,
    "hassibi_ld": _hassibi_ld,
}


@dataclass(frozen=True)
class DispersionMatrix:
    """Real dispersion matrix F with its scheme dimensions attached."""

    scheme: str
    f: np.ndarray  # (2*m_t*t, 2*q)
    m_t: int
    t: int
    q: int

    @property
    def l(self) -> float:
        return self.q / self.t


# ---------------------------------------------------------------------------
# real/imag stacking

def stack_complex(x: np.ndarray) -> np.ndarray:
    """Stack (..., rows, T) complex to (..., 2*rows*T) real, slot-interleaved."""
    parts = np.stack([x.real, x.imag], axis=-1)
    return parts.reshape(x.shape[:-2] + (2 * x.shape[-2] * x.shape[-1],))


def unstack_complex(v: np.ndarray, rows: int, t: int) -> np.ndarray:
    """Inverse of :func:`stack_complex`."""
    parts = v.reshape(v.shape[:-1] + (rows, t, 2))
    return parts[..., 0] + 1j * parts[..., 1]


def stack_symbols(s: np.ndarray) -> np.ndarray:
    """Stack (..., Q) complex symbols to (..., 2Q): even dims real, odd imag."""
    parts = np.stack([s.real, s.imag], axis=-1)
    return parts.reshape(s.shape[:-1] + (2 * s.shape[-1],))


def unstack_symbols(v: np.ndarray) -> np.ndarray:
    parts = v.reshape(v.shape[:-1] + (-1, 2))
    return parts[..., 0] + 1j * parts[..., 1]


def real_channel_matrix(h: np.ndarray, t: int) -> np.ndarray:
    """Real embedding G of a complex channel matrix, per Eq-4-style stacking.

    ``h`` is (..., m_r, m_t) complex; the result is
    (..., 2*m_r*t, 2*m_t*t), composed of (2t x 2t) blocks G_{j,i}, each a
    block-diagonal repetition of the rotation-scaling [[a, -b], [b, a]] of
    the complex coefficient h_{j,i} = a + jb.
    """
    h = np.asarray(h)
    lead = h.shape[:-2]
    m_r, m_t = h.shape[-2:]
    rot = np.empty(lead + (m_r, 2, m_t, 2))
    rot[..., 0, :, 0] = h.real
    rot[..., 0, :, 1] = -h.imag
    rot[..., 1, :, 0] = h.imag
    rot[..., 1, :, 1] = h.real
    g = np.zeros(lead + (m_r, t, 2, m_t, t, 2))
    for slot in range(t):
        g[..., :, slot, :, :, slot, :] = rot
    return g.reshape(lead + (2 * m_r * t, 2 * m_t * t))


# ---------------------------------------------------------------------------
# dispersion matrices

def dispersion_matrix(scheme: str) -> DispersionMatrix:
    """Build the normalized dispersion matrix of a named scheme.

    Columns are obtained by probing the scheme's codeword map with unit
    real/imag basis symbols, so stack(encode(S)) = F @ stack(S) holds by
    construction; a final rescale enforces E||X||_F^2 = Q.
    """
    if scheme not in _ENCODERS:
        raise UnsupportedScheme(
            f"scheme {scheme!r} is not one of {sorted(_ENCODERS)}")
    q, t, _ = SCHEME_SHAPES[scheme]
    encode = _ENCODERS[scheme]
    m_t = 2
    f = np.empty((2 * m_t * t, 2 * q))
    for u in range(2 * q):
        basis = np.zeros(q, dtype=complex)
        basis[u // 2] = 1.0 if u % 2 == 0 else 1.0j
        f[:, u] = stack_complex(encode(basis))
    # unit-energy symbols have variance 1/2 per real dim: E||X||^2 = ||F||^2/2
    f *= np.sqrt(2.0 * q / np.sum(f * f))
    return DispersionMatrix(scheme, f, m_t, t, q)


def st_encode(symbols: np.ndarray, disp: DispersionMatrix) -> np.ndarray:
    """Encode (..., Q) complex symbols to (..., M_T, T) codewords."""
    symbols = np.asarray(symbols, dtype=complex)
    if symbols.shape[-1] != disp.q:
        raise LengthMismatch(
            f"{disp.scheme} expects {disp.q} symbols, got {symbols.shape[-1]}")
    stacked = stack_symbols(symbols) @ disp.f.T
    return unstack_complex(stacked, disp.m_t, disp.t)


def stack_channel(h: np.ndarray, disp: DispersionMatrix) -> np.ndarray:
    """Equivalent real channel G_eq = G(H) F, (..., 2*m_r*T, 2*Q).

    Satisfies stack(H @ st_encode(S)) = G_eq @ stack(S) for every S; the
    1/sqrt(M_T) transmit scaling is NOT included here (the channel and the
    receiver each apply it where the model says so).
    """
    return real_channel_matrix(h, disp.t) @ disp.f


# ---------------------------------------------------------------------------
# plain-text generator format: header "m_t t q", then for each of the 2Q real
# input dimensions the complex basis codeword, row-major, "re im" pairs

def save_dispersion_matrix(path, disp: DispersionMatrix, comment: str = ""):
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append(f"{disp.m_t} {disp.t} {disp.q}")
    for u in range(2 * disp.q):
        x = unstack_complex(disp.f[:, u], disp.m_t, disp.t)
        for row in x:
            lines.append(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_dispersion_matrix(path, scheme: str = "custom") -> DispersionMatrix:
    tokens = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.extend(line.split())
    m_t, t, q = (int(v) for v in tokens[:3])
    values = np.array([float(v) for v in tokens[3:]])
    expected = 2 * q * m_t * t * 2
    if values.size != expected:
        raise LengthMismatch(
            f"generator file holds {values.size} numbers, expected {expected}")
    f = np.empty((2 * m_t * t, 2 * q))
    per_matrix = 2 * m_t * t
    for u in range(2 * q):
        f[:, u] = values[u * per_matrix:(u + 1) * per_matrix]
    return DispersionMatrix(scheme, f, m_t, t, q)
