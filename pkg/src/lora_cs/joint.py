"""Multi-gateway fusion of per-candidate residual profiles."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .cs import CompressedVector
from .phy import ChirpParams
from .recovery import (DEFAULT_K_MAX, ResidualProfile, Solver, demodulate_compressed, measurement_system,
                       refit_profile)

Scheme = Literal["EGC", "sqrt_snr", "MRC", "snr_squared"]
SCHEMES: tuple[Scheme, ...] = ("EGC", "sqrt_snr", "MRC", "snr_squared")
ProfileKind = Literal["refit", "solver"]
PROFILES: tuple[ProfileKind, ...] = ("refit", "solver")

SNR_FLOOR = 1e-3


@dataclass(frozen=True)
class GatewayObservation:
    y: CompressedVector
    gamma: float
    gateway_id: int = 0

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class WeightingScheme:
    kind: Scheme = "MRC"

    def weight(self, gamma: float) -> float:
        if self.kind == "EGC":
            return 1.0
        if self.kind == "sqrt_snr":
            return math.sqrt(gamma)
        if self.kind == "MRC":
            return gamma
        if self.kind == "snr_squared":
            return gamma * gamma
        raise ValueError(f"unknown weighting scheme {self.kind!r}")


def estimate_snr(y: CompressedVector, profile: ResidualProfile) -> float:
    """(||y||^2 - r_min^2) / r_min^2, floored at 1e-3."""
    energy = float(np.vdot(y.y, y.y).real)
    r2 = profile.r_min**2
    if r2 <= 0.0:
        return math.inf if energy > 0 else SNR_FLOOR
    return max(SNR_FLOOR, (energy - r2) / r2)


def gateway_profile(y: CompressedVector, eps: float | None = None, k_max: int = DEFAULT_K_MAX,
                    solver: Solver = "omp", profile: ProfileKind = "refit") -> ResidualProfile:
    """Per-gateway residual profile used for fusion.

    ``"solver"`` keeps the sparse-recovery profile, which equals ||y|| off
    the recovered support.  ``"refit"`` recomputes every candidate with its
    own least-squares coefficient against the up-chirp dictionary, so all
    gateways score the same candidate set.
    """
    if profile == "solver":
        return demodulate_compressed(y, None, eps, k_max, solver).profile
    if profile == "refit":
        return refit_profile(y, measurement_system(y.sf, y.chunk_m, y.seed, "up").theta)
    raise ValueError(f"unknown profile kind {profile!r}")


def fuse(profiles: Sequence[ResidualProfile], norms: Sequence[float], gammas: Sequence[float],
         scheme: WeightingScheme | Scheme = "MRC", normalize: bool = True) -> tuple[int, np.ndarray]:
    """argmin_i sum_g w(gamma_g) r_g[i]; residuals divided by ||y_g|| when ``normalize``."""
    if not profiles:
        raise ValueError("no observations to fuse")
    scheme = WeightingScheme(scheme) if isinstance(scheme, str) else scheme
    fused = np.zeros_like(profiles[0].r)
    for prof, norm, gamma in zip(profiles, norms, gammas):
        r = prof.r / norm if normalize and norm > 0 else prof.r
        fused += scheme.weight(gamma) * r
    return int(np.argmin(fused)), fused


def joint_demodulate(observations: Sequence[GatewayObservation], scheme: WeightingScheme | Scheme = "MRC",
                     params: ChirpParams | None = None, eps: float | None = None,
                     k_max: int = DEFAULT_K_MAX, solver: Solver = "omp",
                     normalize: bool = True, profile: ProfileKind = "refit") -> tuple[int, np.ndarray]:
    """Recover each gateway's residual profile, then fuse them."""
    if not observations:
        raise ValueError("no observations to fuse")
    sf = observations[0].y.sf
    if any(o.y.sf != sf for o in observations) or (params is not None and params.sf != sf):
        raise ValueError("all observations must share one spreading factor")
    profiles = [gateway_profile(o.y, eps, k_max, solver, profile) for o in observations]
    norms = [float(np.linalg.norm(o.y.y)) for o in observations]
    return fuse(profiles, norms, [o.gamma for o in observations], scheme, normalize)
