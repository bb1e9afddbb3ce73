# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_fallback.py``.

Same algorithms, same tie-breaking (first maximum wins).
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs
from libc.stdint cimport uint64_t, int8_t

cnp.import_array()


cdef inline uint64_t _splitmix64(uint64_t seed, uint64_t counter) nogil:
    cdef uint64_t z = seed + (counter + 1) * <uint64_t>0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


def splitmix64(seed, counters):
    cdef uint64_t s = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef cnp.uint64_t[::1] c = np.ascontiguousarray(counters, dtype=np.uint64)
    out = np.empty(c.shape[0], dtype=np.uint64)
    cdef cnp.uint64_t[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(c.shape[0]):
            o[i] = _splitmix64(s, c[i])
    return out


def bernoulli_signs(seed, Py_ssize_t m, Py_ssize_t n):
    cdef uint64_t s = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    out = np.empty((m, n), dtype=np.int8)
    cdef int8_t[:, ::1] o = out
    cdef Py_ssize_t i, k
    with nogil:
        for i in range(m):
            for k in range(n):
                o[i, k] = 1 if (_splitmix64(s, <uint64_t>(i * n + k)) >> 63) else -1
    return out


def omp(const double[:, ::1] A, const double[::1] y, const double[::1] norms, int max_atoms,
        double eps, Py_ssize_t group_size, int max_groups):
    cdef Py_ssize_t rows = A.shape[0], cols = A.shape[1]
    cdef double[:, ::1] L = np.zeros((max_atoms, max_atoms))
    cdef double[::1] z = np.zeros(max_atoms)
    cdef double[::1] w = np.zeros(max_atoms)
    cdef double[::1] coef = np.zeros(max_atoms)
    cdef double[::1] r = np.array(y, dtype=np.float64, copy=True)
    cdef double[::1] score = np.empty(cols)
    cdef cnp.int8_t[::1] blocked = np.zeros(cols, dtype=np.int8)
    cdef Py_ssize_t[::1] support = np.zeros(max_atoms, dtype=np.intp)
    cdef Py_ssize_t[::1] groups = np.zeros(max_groups, dtype=np.intp)
    history = []
    cdef Py_ssize_t k = 0, ngroups = 0, i, j, p, q, best, g
    cdef double acc, best_score, aa, ay, d2, d, rnorm, s
    cdef bint ok

    acc = 0.0
    for i in range(rows):
        acc += r[i] * r[i]
    rnorm = sqrt(acc)
    history.append(rnorm)

    while k < max_atoms and rnorm > eps:
        with nogil:
            # correlation scores A^T r / norms
            for j in range(cols):
                score[j] = 0.0
            for i in range(rows):
                s = r[i]
                for j in range(cols):
                    score[j] += A[i, j] * s
            best = -1
            best_score = 0.0
            for j in range(cols):
                if blocked[j]:
                    continue
                if ngroups >= max_groups:
                    ok = False
                    g = j % group_size
                    for p in range(ngroups):
                        if groups[p] == g:
                            ok = True
                            break
                    if not ok:
                        continue
                s = fabs(score[j]) / norms[j]
                if s > best_score:
                    best_score = s
                    best = j
        if best < 0:
            break
        j = best
        aa = 0.0
        ay = 0.0
        for i in range(rows):
            aa += A[i, j] * A[i, j]
            ay += A[i, j] * y[i]
        # w = L^-1 (A_S^T a)
        d2 = aa
        for p in range(k):
            acc = 0.0
            for i in range(rows):
                acc += A[i, support[p]] * A[i, j]
            for q in range(p):
                acc -= L[p, q] * w[q]
            w[p] = acc / L[p, p]
            d2 -= w[p] * w[p]
        if d2 <= 1e-10 * aa:
            blocked[j] = 1
            continue
        d = sqrt(d2)
        for q in range(k):
            L[k, q] = w[q]
        L[k, k] = d
        acc = ay
        for q in range(k):
            acc -= w[q] * z[q]
        z[k] = acc / d
        support[k] = j
        blocked[j] = 1
        g = j % group_size
        ok = False
        for p in range(ngroups):
            if groups[p] == g:
                ok = True
                break
        if not ok:
            groups[ngroups] = g
            ngroups += 1
        k += 1
        # L^T coef = z
        for p in range(k - 1, -1, -1):
            acc = z[p]
            for q in range(p + 1, k):
                acc -= L[q, p] * coef[q]
            coef[p] = acc / L[p, p]
        acc = 0.0
        for i in range(rows):
            s = y[i]
            for p in range(k):
                s -= A[i, support[p]] * coef[p]
            r[i] = s
            acc += s * s
        rnorm = sqrt(acc)
        history.append(rnorm)

    return (np.asarray(support[:k]).copy(), np.asarray(coef[:k]).copy(),
            np.asarray(history, dtype=np.float64))
