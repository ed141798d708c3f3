"""Gray-mapped QAM constellations and the 2x2 orthogonal space-time code.

The codeword built from two constellation symbols is

    S = [[s1, -conj(s2)],
         [s2,  conj(s1)]]

which satisfies ``S S^H = (|s1|^2 + |s2|^2) I`` and therefore admits
symbol-separable maximum-likelihood decoding after linear combining.
Transmission through the beamformed array multiplies ``S`` by the tall
beamformer ``F`` and the channel row ``h^H``; the receiver only ever
sees the two-dimensional equivalent channel ``F^H h``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beamformer import BeamformingMatrix

NORM_EQ1 = "eq1"
NORM_EQ10 = "eq10"
NORM_MODES = (NORM_EQ1, NORM_EQ10)

SUPPORTED_ORDERS = (2, 4, 16, 64)


@dataclass(frozen=True, eq=False)
class Constellation:
    """Unit-average-energy constellation with Gray bit labels.

    ``points[i]`` is the symbol whose label is the ``bits_per_symbol``-bit
    big-endian binary expansion of ``i``; ``labels[i]`` spells that
    expansion out as a bit row.
    """

    order: int
    points: np.ndarray
    labels: np.ndarray

    @property
    def bits_per_symbol(self) -> int:
        return int(self.labels.shape[1])


def _gray_to_binary(g: np.ndarray) -> np.ndarray:
    b = g.copy()
    shift = 1
    while shift < 64:
        b ^= b >> shift
        shift *= 2
    return b


def make_constellation(order: int) -> Constellation:
    """Build BPSK (order 2) or a Gray-coded square QAM constellation.

    For QAM the label splits into an in-phase half followed by a
    quadrature half; each half is a reflected Gray code over the PAM
    levels, so nearest neighbours along either axis differ in one bit.
    """
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported constellation order {order}")
    if order == 2:
        points = np.array([1.0 + 0.0j, -1.0 + 0.0j])
        labels = np.array([[0], [1]], dtype=np.uint8)
        return Constellation(order=2, points=points, labels=labels)
    k = int(np.log2(order))
    k_axis = k // 2
    n_levels = 1 << k_axis
    labels = np.array(
        [[(i >> (k - 1 - b)) & 1 for b in range(k)] for i in range(order)],
        dtype=np.uint8,
    )
    idx = np.arange(order)
    gray_i = idx >> k_axis
    gray_q = idx & (n_levels - 1)
    level_i = _gray_to_binary(gray_i)
    level_q = _gray_to_binary(gray_q)
    amp = 2.0 * level_i - (n_levels - 1) + 1j * (2.0 * level_q - (n_levels - 1))
    scale = np.sqrt(2.0 * (order - 1) / 3.0)
    return Constellation(order=order, points=amp / scale, labels=labels)


def bits_to_index(bits: np.ndarray) -> int:
    bits = np.asarray(bits, dtype=np.uint8)
    return int(bits @ (1 << np.arange(bits.size - 1, -1, -1)))


def map_bits(bits: np.ndarray, constellation: Constellation) -> complex:
    """Map one label's worth of bits to its constellation point."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape != (constellation.bits_per_symbol,):
        raise ValueError(
            f"expected {constellation.bits_per_symbol} bits, got shape {bits.shape}"
        )
    return complex(constellation.points[bits_to_index(bits)])


def demap(symbol: complex, constellation: Constellation) -> np.ndarray:
    """Bits of the constellation point nearest to ``symbol``."""
    idx = int(np.argmin(np.abs(constellation.points - symbol)))
    return constellation.labels[idx].copy()


def alamouti_codeword(s1: complex, s2: complex) -> np.ndarray:
    return np.array([[s1, -np.conj(s2)], [s2, np.conj(s1)]])


def encode_alamouti(
    bits: np.ndarray,
    constellation: Constellation,
    bf: BeamformingMatrix,
    gamma0: float = 1.0,
    mode: str = NORM_EQ1,
) -> tuple[np.ndarray, np.ndarray]:
    """Encode ``2 * bits_per_symbol`` bits into (S, X).

    ``S`` is the 2x2 orthogonal codeword; ``X`` is the antenna-domain
    block actually transmitted. Under ``eq1`` normalization X = F S and
    all power scaling happens in the link amplitude; ``eq10`` instead
    scales the codeword by ``sqrt(gamma0 * kappa)`` and the link applies
    no further amplitude.
    """
    k = constellation.bits_per_symbol
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape != (2 * k,):
        raise ValueError(f"expected {2 * k} bits, got shape {bits.shape}")
    if bf.n_chains != 2:
        raise ValueError("space-time encoding requires a beamformer with 2 chains")
    if mode not in NORM_MODES:
        raise ValueError(f"unknown normalization mode {mode!r}")
    s = alamouti_codeword(map_bits(bits[:k], constellation), map_bits(bits[k:], constellation))
    x = bf.matrix @ s
    if mode == NORM_EQ10:
        x = np.sqrt(gamma0 * bf.kappa) * x
    return s, x


def eq1_amplitude(power: float, n_antennas: int, n_paths: int) -> float:
    """Link amplitude ``sqrt(P * N_t / L)`` of the received-signal model."""
    return float(np.sqrt(power * n_antennas / n_paths))


def transmit_receive(
    x: np.ndarray,
    h: np.ndarray,
    rng: np.random.Generator,
    amplitude: float = 1.0,
    sigma2: float = 1.0,
) -> np.ndarray:
    """Received row ``y = amplitude * h^H X + z`` with z i.i.d. CN(0, sigma2)."""
    h = np.asarray(h)
    x = np.asarray(x)
    if x.shape[0] != h.shape[0]:
        raise ValueError("channel length does not match codeword rows")
    t = x.shape[1]
    noise = np.sqrt(sigma2 / 2.0) * (
        rng.standard_normal(t) + 1j * rng.standard_normal(t)
    )
    return amplitude * (h.conj() @ x) + noise


def decode_alamouti(
    y: np.ndarray,
    h_eq: np.ndarray,
    constellation: Constellation,
    amplitude: float = 1.0,
) -> np.ndarray:
    """Combine and demap one received block back to bits.

    Linear combining against the known equivalent channel recovers
    per-symbol statistics whose nearest-point decisions coincide with
    joint maximum likelihood, thanks to the codeword's orthogonality.
    A zero equivalent channel is degenerate; by convention the decoder
    then emits the first constellation label twice.
    """
    g1, g2 = h_eq[0], h_eq[1]
    denom = amplitude * (abs(g1) ** 2 + abs(g2) ** 2)
    if denom == 0.0:
        return np.concatenate([constellation.labels[0], constellation.labels[0]])
    s1_hat = (g1 * y[0] + np.conj(g2) * np.conj(y[1])) / denom
    s2_hat = (g2 * y[0] - np.conj(g1) * np.conj(y[1])) / denom
    return np.concatenate(
        [demap(complex(s1_hat), constellation), demap(complex(s2_hat), constellation)]
    )


@dataclass(frozen=True, eq=False)
class ErrorMatrix:
    """Difference of two codewords, ``E = S_k - S_l``."""

    matrix: np.ndarray
    pair_ids: tuple[int, int]

    @property
    def scale(self) -> float:
        """The constant a in ``E E^H = a I``."""
        return float(np.abs(self.matrix[0, 0]) ** 2 + np.abs(self.matrix[1, 0]) ** 2)


def error_matrix(s_k: np.ndarray, s_l: np.ndarray, pair_ids: tuple[int, int] = (0, 1)) -> ErrorMatrix:
    return ErrorMatrix(matrix=np.asarray(s_k) - np.asarray(s_l), pair_ids=pair_ids)


def alamouti_codebook(constellation: Constellation) -> tuple[np.ndarray, np.ndarray]:
    """All ``M**2`` codewords with their source-bit labels.

    Codeword ``i1 * M + i2`` encodes symbol labels (i1, i2); the returned
    bit rows concatenate the two symbol labels.
    """
    m = constellation.order
    k = constellation.bits_per_symbol
    codewords = np.empty((m * m, 2, 2), dtype=np.complex128)
    bits = np.empty((m * m, 2 * k), dtype=np.uint8)
    for i1 in range(m):
        for i2 in range(m):
            idx = i1 * m + i2
            codewords[idx] = alamouti_codeword(
                complex(constellation.points[i1]), complex(constellation.points[i2])
            )
            bits[idx, :k] = constellation.labels[i1]
            bits[idx, k:] = constellation.labels[i2]
    return codewords, bits
