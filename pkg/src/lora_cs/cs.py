"""Chirp dictionary, Bernoulli measurement matrix and edge-side compression.

The gateway only ever applies one 128-column measurement matrix (the SF7
symbol length).  Longer symbols are compressed chunk by chunk and the
chunks' measurements concatenated, which is the same as applying a
block-diagonal matrix built from copies of the SF7 one.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Literal

import numpy as np
import scipy.fft

from . import kernels
from .phy import ChirpParams, Direction, make_chirp

CHUNK = 128
DEFAULT_SEED = 0x5EED_C0DE_2020

SnrBand = Literal["low", "medium", "high"]

# Reliable M/N per (sf, band) for synchronized symbols.
TABLE_SYNC: dict[tuple[int, SnrBand], Fraction] = {
    (7, "low"): Fraction(1), (8, "low"): Fraction(1, 2), (9, "low"): Fraction(1, 4), (10, "low"): Fraction(1, 8),
    (7, "medium"): Fraction(1, 4), (8, "medium"): Fraction(1, 8), (9, "medium"): Fraction(1, 16), (10, "medium"): Fraction(1, 32),
    (7, "high"): Fraction(1, 8), (8, "high"): Fraction(1, 16), (9, "high"): Fraction(1, 32), (10, "high"): Fraction(1, 32),
}  # fmt: skip

BAND_ANCHORS_DB: dict[SnrBand, float] = {"low": -6.0, "medium": 0.0, "high": 6.0}


# --------------------------------------------------------------------------
# dictionary


def downchirp_diagonal(params: ChirpParams, direction: Direction = "up") -> np.ndarray:
    """Diagonal of U: the conjugate base chirp of ``direction``."""
    return np.conj(make_chirp(params, 0, direction))


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix with entries w**(ik)/sqrt(n), w = exp(-2*pi*j/n)."""
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


@dataclass(frozen=True, eq=False)
class Dictionary:
    """N x N synthesis matrix whose column i is the (unit-norm) chirp of value i."""

    psi: np.ndarray = field(repr=False)
    direction: Direction
    params: ChirpParams

    def analyze(self, x: np.ndarray) -> np.ndarray:
        """Coefficients s with x = psi @ s (W U x for the up dictionary)."""
        u = downchirp_diagonal(self.params, self.direction)
        s = np.fft.fft(u * x, norm="ortho")
        # The down dictionary orders columns by symbol value, i.e. the
        # conjugate DFT; value v of a down-chirp lands on bin -v.
        return s if self.direction == "up" else np.roll(s[::-1], 1)


def build_dictionary(params: ChirpParams, direction: Direction = "up") -> Dictionary:
    """Psi = U^-1 W^-1 for up-chirps.

    For down-chirps U is built from the up-chirp and W is conjugated so that
    column i still holds the symbol of value i.
    """
    return _cached_dictionary(params.sf, params.bw, direction)


@lru_cache(maxsize=None)
def _cached_dictionary(sf: int, bw: float, direction: Direction) -> Dictionary:
    params = ChirpParams(sf, bw)
    n = params.n
    u_inv = 1.0 / downchirp_diagonal(params, direction)
    w = dft_matrix(n)
    w_inv = np.conj(w.T) if direction == "up" else w.T
    psi = u_inv[:, None] * w_inv
    psi.setflags(write=False)
    return Dictionary(psi, direction, params)


# --------------------------------------------------------------------------
# measurement


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """m x 128 matrix of +/-1 regenerable from ``seed``."""

    phi: np.ndarray = field(repr=False)
    seed: int
    m: int
    n: int = CHUNK

    @property
    def alpha(self) -> float:
        return compression_ratio(self.m, self.n)


def build_measurement(seed: int = DEFAULT_SEED, m: int = CHUNK) -> MeasurementMatrix:
    """Deterministic Bernoulli matrix.

    Entry (i, k) is +1 when the top bit of SplitMix64 output number
    ``i*128 + k`` for state ``seed`` is set, else -1.  Rows do not depend on
    ``m``, so a smaller matrix is a prefix of a larger one.
    """
    if m < 1 or m > CHUNK or m & (m - 1):
        raise ValueError(f"m must be a power of two in [1, {CHUNK}], got {m}")
    return _cached_measurement(int(seed) & ((1 << 64) - 1), m)


@lru_cache(maxsize=64)
def _cached_measurement(seed: int, m: int) -> MeasurementMatrix:
    phi = kernels.bernoulli_signs(seed, m, CHUNK).astype(np.float64)
    phi.setflags(write=False)
    return MeasurementMatrix(phi, seed, m)


def block_diagonal(phi7: MeasurementMatrix, sf: int) -> np.ndarray:
    """Phi_sf: 2**(sf-7) copies of the SF7 matrix on the diagonal."""
    return np.kron(np.eye(1 << (sf - 7)), phi7.phi)


# --------------------------------------------------------------------------
# compression


@dataclass(frozen=True, eq=False)
class CompressedVector:
    y: np.ndarray
    sf: int
    chunk_m: int
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.y.shape != ((1 << (self.sf - 7)) * self.chunk_m,):
            raise ValueError(f"y has length {self.y.shape}, expected {(1 << (self.sf - 7)) * self.chunk_m}")

    @property
    def m_total(self) -> int:
        return self.y.shape[0]

    def scaled(self, c: complex) -> "CompressedVector":
        return CompressedVector(self.y * c, self.sf, self.chunk_m, self.seed)


def compress(block: np.ndarray, phi7: MeasurementMatrix) -> CompressedVector:
    block = np.asarray(block)
    n = block.shape[0]
    if block.ndim != 1 or n < CHUNK or n & (n - 1) or n > 1 << 10:
        raise ValueError(f"block length must be 2**sf with sf in [7, 10], got shape {block.shape}")
    sf = n.bit_length() - 1
    chunks = block.reshape(-1, CHUNK)
    y = (chunks @ phi7.phi.T).reshape(-1)
    return CompressedVector(y, sf, phi7.m, phi7.seed)


def compression_ratio(m_total: int, n: int) -> float:
    """Fraction of samples removed: 1 - m_total/n."""
    if not 0 < m_total <= n:
        raise ValueError("need 0 < m_total <= n")
    return 1.0 - m_total / n


def min_measurements(k: int, d: int) -> float:
    """Empirical lower bound 2 k ln(d/k) on measurements for k-sparse recovery."""
    if not 0 < k < d:
        raise ValueError("need 0 < k < d")
    return 2.0 * k * math.log(d / k)


# --------------------------------------------------------------------------
# ratio selection


def snr_band(snr_db: float) -> SnrBand:
    if snr_db <= -3.0:
        return "low"
    if snr_db <= 3.0:
        return "medium"
    return "high"


@dataclass(frozen=True)
class RatioPolicy:
    mode: Literal["formula", "table"] = "formula"
    sync: bool = True
    table: dict[tuple[int, SnrBand], Fraction] = field(default_factory=lambda: dict(TABLE_SYNC))


def formula_alpha(sf: int, snr_db: float, sync: bool = True) -> Fraction:
    """Empirical compression ratio from SF and SNR, as an exact fraction.

    sync:   max(min(1 - 2**-floor(snr/3 + sf - 5), 1 - 2 sf / 2**sf), 0)
    unsync: max(min(1 - 2**-floor(snr/3 + sf - 6), 1 - 4 (sf-1) / 2**sf), 0)
    """
    if math.isinf(snr_db):
        snr_db = math.copysign(1e9, snr_db)
    n = 1 << sf
    if sync:
        e = math.floor(snr_db / 3 + sf - 5)
        bound = 1 - Fraction(2 * sf, n)
    else:
        e = math.floor(snr_db / 3 + sf - 6)
        bound = 1 - Fraction(4 * (sf - 1), n)
    snr_term = 1 - (Fraction(1, 1 << e) if e >= 0 else Fraction(1 << -e))
    return max(min(snr_term, bound), Fraction(0))


def _round_up_pow2(x: Fraction) -> int:
    m = 1
    while m < x:
        m <<= 1
    return m


def select_ratio(sf: int, snr_db: float, sync: bool = True, policy: RatioPolicy | None = None) -> tuple[int, float]:
    """Pick (m_total, alpha) for a symbol of spreading factor ``sf``.

    Formula mode rounds M = (1 - alpha) N up to a power of two, so it never
    compresses harder than the formula allows.  Table mode reads M/N from
    the reliable-ratio table for the SNR band of ``snr_db``.
    """
    policy = policy or RatioPolicy(sync=sync)
    n = 1 << sf
    chunks = n // CHUNK
    if policy.mode == "table":
        if not sync:
            raise ValueError("the reliable-ratio table only covers synchronized symbols")
        m_total = int(policy.table[(sf, snr_band(snr_db))] * n)
    else:
        m_total = _round_up_pow2((1 - formula_alpha(sf, snr_db, sync)) * n)
    # at least 16 measurements in total, at most one full chunk per chunk
    chunk_m = min(max(m_total // chunks, 16 // chunks), CHUNK)
    m_total = chunk_m * chunks
    return m_total, compression_ratio(m_total, n)


def formula_table_disagreements() -> list[tuple[int, SnrBand, int, int]]:
    """Cells where formula mode and the table disagree: (sf, band, m_formula, m_table)."""
    out = []
    for (sf, band), frac in sorted(TABLE_SYNC.items()):
        m_formula, _ = select_ratio(sf, BAND_ANCHORS_DB[band], True, RatioPolicy("formula"))
        m_table = int(frac * (1 << sf))
        if m_formula != m_table:
            out.append((sf, band, m_formula, m_table))
    return out


# --------------------------------------------------------------------------
# comparison domains and export


def sparsity_count(coeffs: np.ndarray, threshold: float = 0.1) -> int:
    """Number of coefficients whose magnitude exceeds ``threshold`` * max."""
    mag = np.abs(coeffs)
    peak = mag.max()
    if peak == 0:
        return 0
    return int(np.count_nonzero(mag > threshold * peak))


def domain_coefficients(x: np.ndarray, domain: str, params: ChirpParams | None = None) -> np.ndarray:
    if domain == "chirp":
        assert params is not None
        return build_dictionary(params).analyze(x)
    if domain == "dft":
        return np.fft.fft(x, norm="ortho")
    if domain == "dct":
        return scipy.fft.dct(x, type=2, norm="ortho")
    raise ValueError(f"unknown domain {domain!r}")


def export_matrix_csv(path: str | Path, matrix: np.ndarray, *, sf: int | None = None,
                      seed: int | None = None, m: int | None = None) -> None:
    """Row-major CSV; complex entries become re,im column pairs."""
    matrix = np.asarray(matrix)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"sf={'' if sf is None else sf}", f"seed={'' if seed is None else seed}",
                    f"m={'' if m is None else m}"])
        if np.iscomplexobj(matrix):
            for row in matrix:
                w.writerow([f"{v:.17g}" for pair in zip(row.real, row.imag) for v in pair])
        else:
            for row in matrix:
                w.writerow([f"{v:.17g}" if isinstance(v, float) else str(v) for v in row.tolist()])
