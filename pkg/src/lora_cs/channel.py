"""Seedable flat AWGN channel and fan-out to several gateways.

SNR is per complex sample over the (critically sampled) channel bandwidth:
noise variance = mean(|x|^2) * 10**(-snr_db/10).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float
    timing_offset: int | str = 0
    noise_seed: int = 0
    gateway_id: int = 0


def noise_variance(x: np.ndarray, snr_db: float) -> float:
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    power = float(np.mean(np.abs(x) ** 2))
    return power * 10.0 ** (-snr_db / 10.0)


def complex_noise(n: int, variance: float, rng: np.random.Generator) -> np.ndarray:
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def apply_awgn(x: np.ndarray, snr_db: float, seed: int | np.random.Generator | None) -> np.ndarray:
    """Add circularly-symmetric Gaussian noise; ``snr_db=inf`` returns a copy."""
    x = np.asarray(x, dtype=np.complex128)
    if x.size == 0:
        raise ValueError("empty signal")
    var = noise_variance(x, snr_db)
    if var == 0.0:
        return x.copy()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return x + complex_noise(x.size, var, rng)


def broadcast(x: np.ndarray, configs: Sequence[ChannelConfig]) -> list[np.ndarray]:
    """One noisy copy of ``x`` per gateway.

    Gateway ``g`` draws its noise with seed ``noise_seed ^ gateway_id``, so
    a single gateway with id 0 sees exactly ``apply_awgn(x, snr, noise_seed)``.
    """
    if not configs:
        raise ValueError("need at least one gateway")
    return [apply_awgn(x, c.snr_db, c.noise_seed ^ c.gateway_id) for c in configs]


def quantize(x: np.ndarray, bits: int = 12, full_scale: float | None = None) -> np.ndarray:
    """Uniform mid-tread quantizer on I and Q, clipping at +/- full_scale.

    Returns signed integer codes (int16) as a (len, 2) array.  The default
    full scale is 4x the per-component RMS.
    """
    x = np.asarray(x)
    iq = np.stack([x.real, x.imag], axis=-1)
    if full_scale is None:
        rms = float(np.sqrt(np.mean(iq**2)))
        full_scale = 4.0 * rms if rms > 0 else 1.0
    top = (1 << (bits - 1)) - 1
    codes = np.clip(np.round(iq / full_scale * top), -top - 1, top)
    return codes.astype(np.int16)


def dequantize(codes: np.ndarray, bits: int, full_scale: float) -> np.ndarray:
    top = (1 << (bits - 1)) - 1
    iq = codes.astype(np.float64) * full_scale / top
    return iq[..., 0] + 1j * iq[..., 1]
