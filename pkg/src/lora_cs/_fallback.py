"""Pure numpy implementations of the hot kernels.

These are the reference versions; ``_kernels.pyx`` mirrors them step for
step and the test suite checks the two agree.
"""
from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def splitmix64(seed: int, counters: np.ndarray) -> np.ndarray:
    """SplitMix64 output number ``counter`` of the stream started at ``seed``."""
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + (c + np.uint64(1)) * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        z = z ^ (z >> np.uint64(31))
    return z


def bernoulli_signs(seed: int, m: int, n: int) -> np.ndarray:
    """m x n matrix of +/-1: +1 where the top bit of splitmix64(seed, i*n+k) is set."""
    bits = splitmix64(seed, np.arange(m * n, dtype=np.uint64)) >> np.uint64(63)
    return (2 * bits.astype(np.int8) - 1).reshape(m, n)


def omp(
    A: np.ndarray,
    y: np.ndarray,
    norms: np.ndarray,
    max_atoms: int,
    eps: float,
    group_size: int,
    max_groups: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthogonal matching pursuit on a real system.

    Atoms ``j`` and ``j + group_size`` belong to the same group; once
    ``max_groups`` distinct groups are in the support only atoms from those
    groups may still be selected.

    Returns (support, coefficients on the support, residual-norm history).
    """
    rows, cols = A.shape
    support: list[int] = []
    L = np.zeros((max_atoms, max_atoms))
    z = np.zeros(max_atoms)
    coef = np.zeros(0)
    blocked = np.zeros(cols, dtype=bool)
    groups: set[int] = set()
    r = y.copy()
    history = [float(np.sqrt(r @ r))]

    while len(support) < max_atoms and history[-1] > eps:
        score = np.abs(A.T @ r) / norms
        score[blocked] = -1.0
        if len(groups) >= max_groups:
            in_group = np.isin(np.arange(cols) % group_size, list(groups))
            score[~in_group] = -1.0
        j = int(np.argmax(score))
        if score[j] <= 0.0:
            break
        a = A[:, j]
        k = len(support)
        w = np.zeros(0)
        if k:
            v = A[:, support].T @ a
            w = _forward(L[:k, :k], v)
        d2 = a @ a - w @ w
        if d2 <= 1e-10 * (a @ a):
            blocked[j] = True
            continue
        d = np.sqrt(d2)
        L[k, :k] = w
        L[k, k] = d
        z[k] = (a @ y - w @ z[:k]) / d
        support.append(j)
        blocked[j] = True
        groups.add(j % group_size)
        coef = _backward(L[: k + 1, : k + 1], z[: k + 1])
        r = y - A[:, support] @ coef
        history.append(float(np.sqrt(r @ r)))

    return np.asarray(support, dtype=np.intp), coef, np.asarray(history)


def _forward(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.zeros_like(b)
    for i in range(b.shape[0]):
        x[i] = (b[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def _backward(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    # solves L.T x = b
    n = b.shape[0]
    x = np.zeros_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - L[i + 1 :, i] @ x[i + 1 :]) / L[i, i]
    return x
