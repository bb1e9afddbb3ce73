"""Cloud-side recovery of chirp symbols from compressed measurements.

The complex problem y = Theta s (Theta = Phi Psi) is lifted to the real
system y' = Theta' s' with

    y' = [Re y; Im y],  s' = [Re s; Im s],  Theta' = [[Re, -Im], [Im, Re]],

solved for a sparse s', folded back to complex s, and the symbol is the
candidate whose single-coefficient reconstruction leaves the smallest
residual.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal, NamedTuple

import numpy as np

from . import kernels
from .cs import CHUNK, DEFAULT_SEED, CompressedVector, build_dictionary, build_measurement
from .phy import ChirpParams, Direction

Solver = Literal["omp", "fista"]

DEFAULT_K_MAX = 4
SATISFACTORY = 0.8


@dataclass(frozen=True, eq=False)
class RealifiedSystem:
    y_real: np.ndarray
    theta_real: np.ndarray
    norms: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.norms is None:
            object.__setattr__(self, "norms", np.linalg.norm(self.theta_real, axis=0))

    @property
    def d(self) -> int:
        """Number of complex candidates."""
        return self.theta_real.shape[1] // 2

    @property
    def m_total(self) -> int:
        return self.theta_real.shape[0] // 2

    def with_y(self, y: np.ndarray) -> "RealifiedSystem":
        return RealifiedSystem(realify_vector(y), self.theta_real, self.norms)


def realify_vector(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y)
    return np.concatenate([y.real, y.imag]).astype(np.float64)


def realify_matrix(theta: np.ndarray) -> np.ndarray:
    re, im = theta.real, theta.imag
    return np.ascontiguousarray(np.block([[re, -im], [im, re]]), dtype=np.float64)


def realify(y: CompressedVector | np.ndarray, theta: np.ndarray) -> RealifiedSystem:
    yv = y.y if isinstance(y, CompressedVector) else np.asarray(y)
    if theta.ndim != 2 or theta.shape[0] != yv.shape[0]:
        raise ValueError(f"theta has shape {theta.shape}, incompatible with y of length {yv.shape[0]}")
    return RealifiedSystem(realify_vector(yv), realify_matrix(theta))


def complexify(system: RealifiedSystem) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`realify`: returns (y, theta)."""
    m, d = system.m_total, system.d
    y = system.y_real[:m] + 1j * system.y_real[m:]
    theta = system.theta_real[:m, :d] + 1j * system.theta_real[m:, :d]
    return y, theta


def fold(s_real: np.ndarray) -> np.ndarray:
    d = s_real.shape[0] // 2
    return s_real[:d] + 1j * s_real[d:]


@dataclass(frozen=True, eq=False)
class SparseSolution:
    s_opt: np.ndarray
    support: tuple[int, ...]
    residual_norm: float
    iterations: int
    eps: float = 0.0
    history: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    solver: Solver = "omp"

    @property
    def converged(self) -> bool:
        return self.residual_norm <= self.eps


def solve_l1(system: RealifiedSystem, eps: float = 0.0, k_max: int = DEFAULT_K_MAX,
             solver: Solver = "omp") -> SparseSolution:
    """Sparse solution of the real system, folded to complex coefficients.

    ``k_max`` bounds the number of complex candidates in the support.  The
    greedy solver stops once the residual norm is within ``eps``; the
    proximal solver shrinks its l1 weight until it is, or gives up.  A
    solution that misses ``eps`` is returned anyway with
    ``converged == False``.
    """
    if eps < 0 or k_max < 1:
        raise ValueError("need eps >= 0 and k_max >= 1")
    if solver == "omp":
        return _solve_omp(system, eps, k_max)
    if solver == "fista":
        return _solve_fista(system, eps, k_max)
    raise ValueError(f"unknown solver {solver!r}")


def _solve_omp(system: RealifiedSystem, eps: float, k_max: int) -> SparseSolution:
    d = system.d
    support, coef, history = kernels.omp(system.theta_real, system.y_real, system.norms,
                                         2 * k_max, float(eps), d, k_max)
    s_real = np.zeros(2 * d)
    s_real[support] = coef
    s = fold(s_real)
    folded = tuple(sorted({int(j) % d for j in support}))
    return SparseSolution(s, folded, float(history[-1]), len(support), eps, history, "omp")


def _solve_fista(system: RealifiedSystem, eps: float, k_max: int,
                 inner: int = 150, max_iter: int = 1500) -> SparseSolution:
    """Basis-pursuit denoising by accelerated proximal gradient with continuation.

    Minimizes 0.5 ||y' - A s'||^2 + mu ||s'||_1, halving mu from
    0.9 ||A^T y'||_inf until the residual drops to ``eps``.
    """
    A, y = system.theta_real, system.y_real
    d = system.d
    lip = _lipschitz(A)
    s = np.zeros(A.shape[1])
    ynorm = float(np.linalg.norm(y))
    history = [ynorm]
    if ynorm == 0.0:
        return SparseSolution(np.zeros(d, complex), (), 0.0, 0, eps, np.asarray(history), "fista")
    mu = 0.9 * float(np.max(np.abs(A.T @ y)))
    it = 0
    while it < max_iter:
        z, s_prev, t = s.copy(), s.copy(), 1.0
        for _ in range(inner):
            grad = A.T @ (A @ z - y)
            u = z - grad / lip
            s = np.sign(u) * np.maximum(np.abs(u) - mu / lip, 0.0)
            t_next = 0.5 * (1 + math.sqrt(1 + 4 * t * t))
            z = s + ((t - 1) / t_next) * (s - s_prev)
            s_prev, t = s, t_next
            it += 1
        rnorm = float(np.linalg.norm(y - A @ s))
        history.append(rnorm)
        if rnorm <= eps or mu < 1e-9 * ynorm:
            break
        mu *= 0.5
    sc = fold(s)
    mags = np.abs(sc)
    nz = np.flatnonzero(mags)
    if nz.size > k_max:
        keep = nz[np.argsort(-mags[nz], kind="stable")[:k_max]]
        nz = np.sort(keep)
    sc = _debias(A, y, nz, d)
    rnorm = float(np.linalg.norm(y - A @ np.concatenate([sc.real, sc.imag])))
    return SparseSolution(sc, tuple(int(i) for i in nz), rnorm, it, eps, np.asarray(history), "fista")


def _debias(A: np.ndarray, y: np.ndarray, groups: np.ndarray, d: int) -> np.ndarray:
    """Least-squares refit on the kept candidates, removing the l1 shrinkage."""
    sc = np.zeros(d, dtype=complex)
    if groups.size == 0:
        return sc
    cols = np.concatenate([groups, groups + d])
    coef, *_ = np.linalg.lstsq(A[:, cols], y, rcond=None)
    sc[groups] = coef[:groups.size] + 1j * coef[groups.size:]
    return sc


def _lipschitz(A: np.ndarray) -> float:
    return float(np.linalg.norm(A, 2) ** 2)


# --------------------------------------------------------------------------
# residuals


@dataclass(frozen=True, eq=False)
class ResidualProfile:
    r: np.ndarray
    direction: Direction = "up"

    @property
    def best(self) -> int:
        return int(np.argmin(self.r))

    @property
    def r_min(self) -> float:
        return float(self.r.min())

    def normalized(self, scale: float) -> "ResidualProfile":
        return ResidualProfile(self.r / scale if scale > 0 else self.r.copy(), self.direction)


def residual_profile(y: CompressedVector | np.ndarray, phi_blockdiag: np.ndarray, psi: np.ndarray,
                     s_opt: np.ndarray, direction: Direction = "up") -> ResidualProfile:
    """r[i] = ||y - Phi Psi delta_i(s_opt)||_2 for every candidate i."""
    return _profile(_yvec(y), phi_blockdiag @ psi, s_opt, direction)


def _profile(y: np.ndarray, theta: np.ndarray, s_opt: np.ndarray, direction: Direction) -> ResidualProfile:
    # Candidates with a zero coefficient reconstruct nothing, so their
    # residual is ||y||; only the support needs explicit evaluation.
    r = np.full(theta.shape[1], float(np.linalg.norm(y)))
    for i in np.flatnonzero(s_opt):
        r[i] = np.linalg.norm(y - theta[:, i] * s_opt[i])
    return ResidualProfile(r, direction)


def refit_profile(y: CompressedVector | np.ndarray, theta: np.ndarray, direction: Direction = "up") -> ResidualProfile:
    """Residual of every candidate with its own least-squares coefficient.

    r[i] = min_c ||y - c theta_i||_2.  Unlike the solver profile this is
    informative for every candidate, not only the recovered support, which
    is what lets weak observations contribute when profiles are fused.
    """
    yv = _yvec(y)
    corr = theta.conj().T @ yv
    power = np.einsum("ij,ij->j", theta.real, theta.real) + np.einsum("ij,ij->j", theta.imag, theta.imag)
    r2 = float(np.vdot(yv, yv).real) - np.abs(corr) ** 2 / power
    return ResidualProfile(np.sqrt(np.maximum(r2, 0.0)), direction)


def _yvec(y: CompressedVector | np.ndarray) -> np.ndarray:
    return y.y if isinstance(y, CompressedVector) else np.asarray(y)


# --------------------------------------------------------------------------
# cached systems


class MeasurementSystem(NamedTuple):
    theta: np.ndarray
    system: RealifiedSystem


def measurement_system(sf: int, chunk_m: int, seed: int = DEFAULT_SEED,
                       direction: Direction = "up") -> MeasurementSystem:
    """Theta = Phi_sf Psi and its real lift, built once per configuration."""
    return _measurement_system(sf, chunk_m, int(seed), direction)


@lru_cache(maxsize=32)
def _measurement_system(sf: int, chunk_m: int, seed: int, direction: Direction) -> MeasurementSystem:
    params = ChirpParams(sf)
    psi = build_dictionary(params, direction).psi
    phi = build_measurement(seed, chunk_m).phi
    n = params.n
    # block-diagonal Phi applied chunk by chunk
    theta = np.concatenate([phi @ psi[c * CHUNK:(c + 1) * CHUNK] for c in range(n // CHUNK)])
    theta.setflags(write=False)
    real = realify_matrix(theta)
    real.setflags(write=False)
    system = RealifiedSystem(np.zeros(real.shape[0]), real)
    return MeasurementSystem(theta, system)


def auto_eps(system: RealifiedSystem) -> float:
    """sqrt(2 M) * sigma, sigma estimated from the residual after the strongest candidate."""
    m2 = system.theta_real.shape[0]
    _, _, history = kernels.omp(system.theta_real, system.y_real, system.norms, 2, 0.0, system.d, 1)
    dof = max(m2 - 2, 1)
    sigma = history[-1] / math.sqrt(dof)
    return math.sqrt(m2) * sigma


# --------------------------------------------------------------------------
# demodulation


class Demodulation(NamedTuple):
    value: int
    profile: ResidualProfile
    direction: Direction
    solution: SparseSolution


def demodulate_direction(y: CompressedVector, direction: Direction, eps: float | None = None,
                         k_max: int = DEFAULT_K_MAX, solver: Solver = "omp") -> Demodulation:
    ms = measurement_system(y.sf, y.chunk_m, y.seed, direction)
    system = ms.system.with_y(y.y)
    e = auto_eps(system) if eps is None else eps
    sol = solve_l1(system, e, k_max, solver)
    prof = _profile(y.y, ms.theta, sol.s_opt, direction)
    return Demodulation(prof.best, prof, direction, sol)


def demodulate_compressed(y: CompressedVector, params: ChirpParams | None = None, eps: float | None = None,
                          k_max: int = DEFAULT_K_MAX, solver: Solver = "omp",
                          try_down: bool = True) -> Demodulation:
    """Decode one compressed block.

    Tries the up-chirp dictionary first.  If its best residual is above
    0.8 ||y|| the down-chirp dictionary is tried too and the direction with
    the smaller best residual wins.  ``eps=None`` estimates the stopping
    tolerance from the measurement itself.
    """
    if params is not None and params.sf != y.sf:
        raise ValueError("params.sf does not match the compressed vector")
    up = demodulate_direction(y, "up", eps, k_max, solver)
    ynorm = float(np.linalg.norm(y.y))
    if not try_down or up.profile.r_min <= SATISFACTORY * ynorm:
        return up
    down = demodulate_direction(y, "down", eps, k_max, solver)
    return down if down.profile.r_min < up.profile.r_min else up
