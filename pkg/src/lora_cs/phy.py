"""LoRa chirp-spread-spectrum symbols at critical (complex) sampling.

Symbols are generated from the closed-form discrete chirp

    x_v[k] = exp(j*2*pi*(k**2 / (2n) + (v/n - 1/2) * k)),   k = 0..n-1

whose instantaneous frequency ramps linearly through [-BW/2, BW/2) and wraps
at the band edge after ``n - v`` samples.  De-chirping with the conjugate of
the value-0 chirp leaves the pure tone exp(j*2*pi*v*k/n), so a clean symbol
is exactly one DFT bin.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

Direction = Literal["up", "down"]

SF_RANGE = (7, 10)
DEFAULT_BW = 125_000.0


@dataclass(frozen=True)
class ChirpParams:
    """Spreading factor and bandwidth; fixes the symbol geometry."""

    sf: int
    bw: float = DEFAULT_BW

    def __post_init__(self) -> None:
        if not isinstance(self.sf, (int, np.integer)) or not SF_RANGE[0] <= self.sf <= SF_RANGE[1]:
            raise ValueError(f"sf must be an integer in [{SF_RANGE[0]}, {SF_RANGE[1]}], got {self.sf!r}")
        if self.bw <= 0:
            raise ValueError("bandwidth must be positive")

    @property
    def n(self) -> int:
        """Samples per symbol (2**sf)."""
        return 1 << int(self.sf)

    @property
    def fs(self) -> float:
        """Complex sample rate; critical sampling means fs == bw."""
        return self.bw

    @property
    def t(self) -> float:
        """Symbol duration in seconds."""
        return self.n / self.bw


@dataclass(frozen=True)
class Symbol:
    value: int
    direction: Direction = "up"


@dataclass
class Packet:
    """Payload-only packet; no preamble or sync word is modelled."""

    sf: int
    symbols: list[Symbol] = field(default_factory=list)
    tx_power_dbm: float | None = None

    def __post_init__(self) -> None:
        if len(self.symbols) < 1:
            raise ValueError("a packet needs at least one symbol")
        n = 1 << int(self.sf)
        for s in self.symbols:
            if not 0 <= s.value < n:
                raise ValueError(f"symbol value {s.value} out of range for sf={self.sf}")

    @classmethod
    def from_values(cls, sf: int, values: Sequence[int], direction: Direction = "up") -> "Packet":
        return cls(sf, [Symbol(int(v), direction) for v in values])

    @property
    def values(self) -> list[int]:
        return [s.value for s in self.symbols]


def make_chirp(params: ChirpParams, value: int, direction: Direction = "up") -> np.ndarray:
    """Return the unit-amplitude chirp carrying ``value``.

    Down-chirps are the complex conjugate of the up-chirp with the same value.
    """
    n = params.n
    if not 0 <= value < n:
        raise ValueError(f"value must be in [0, {n - 1}], got {value}")
    if direction not in ("up", "down"):
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    k = np.arange(n, dtype=np.float64)
    # Reduce the phase in cycles before multiplying by 2*pi so large k stays accurate.
    cycles = np.mod(k * k / (2 * n) + (value / n - 0.5) * k, 1.0)
    x = np.exp(2j * np.pi * cycles)
    return x if direction == "up" else np.conj(x)


def base_downchirp(params: ChirpParams) -> np.ndarray:
    return make_chirp(params, 0, "down")


def fft_demodulate(block: np.ndarray, params: ChirpParams) -> tuple[int, float]:
    """Classic pulse-compression demodulation of one up-chirp block.

    Returns the argmax bin and the peak share ``|X[peak]| / sum |X|``.
    """
    block = np.asarray(block)
    if block.shape != (params.n,):
        raise ValueError(f"block must have shape ({params.n},), got {block.shape}")
    spectrum = np.abs(np.fft.fft(block * base_downchirp(params)))
    peak = int(np.argmax(spectrum))
    total = float(spectrum.sum())
    ratio = float(spectrum[peak] / total) if total > 0 else 0.0
    return peak, ratio


def modulate_packet(packet: Packet, params: ChirpParams) -> np.ndarray:
    if packet.sf != params.sf:
        raise ValueError("packet sf does not match params")
    return np.concatenate([make_chirp(params, s.value, s.direction) for s in packet.symbols])


def extract_block(stream: np.ndarray, offset: int, params: ChirpParams) -> np.ndarray:
    """Cut the n-sample window starting at ``offset``.

    Offsets that are not multiples of n give unsynchronized blocks straddling
    two consecutive symbols.
    """
    stream = np.asarray(stream)
    n = params.n
    if offset < 0 or offset + n > stream.shape[0]:
        raise ValueError(f"window [{offset}, {offset + n}) outside stream of length {stream.shape[0]}")
    return stream[offset : offset + n].copy()


def write_iq(path: str | Path, samples: np.ndarray) -> None:
    """Write interleaved little-endian float32 I/Q pairs."""
    np.asarray(samples, dtype="<c8").tofile(path)


def read_iq(path: str | Path) -> np.ndarray:
    data = np.fromfile(path, dtype="<f4")
    if data.size % 2:
        raise ValueError(f"{path}: odd number of float32 values, not an I/Q stream")
    return (data[0::2] + 1j * data[1::2]).astype(np.complex128)
