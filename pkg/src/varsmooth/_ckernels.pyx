# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_kernels_py``.

Built with ``-ffp-contract=off`` so that no fused multiply-adds change the
rounding relative to the numpy fallback.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def diff_rows(u):
    cdef const double[:, ::1] U = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t m = U.shape[0], n = U.shape[1], i, j
    out = np.zeros((m, n))
    cdef double[:, ::1] O = out
    for i in range(m - 1):
        for j in range(n):
            O[i, j] = U[i + 1, j] - U[i, j]
    return out


def diff_rows_adj(y):
    cdef const double[:, ::1] Y = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t m = Y.shape[0], n = Y.shape[1], i, j
    out = np.zeros((m, n))
    cdef double[:, ::1] O = out
    if m == 1:
        return out
    for j in range(n):
        O[0, j] = -Y[0, j]
    for i in range(1, m - 1):
        for j in range(n):
            O[i, j] = Y[i - 1, j] - Y[i, j]
    for j in range(n):
        O[m - 1, j] = Y[m - 2, j]
    return out


def diff_cols(u):
    cdef const double[:, ::1] U = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t m = U.shape[0], n = U.shape[1], i, j
    out = np.zeros((m, n))
    cdef double[:, ::1] O = out
    for i in range(m):
        for j in range(n - 1):
            O[i, j] = U[i, j + 1] - U[i, j]
    return out


def diff_cols_adj(y):
    cdef const double[:, ::1] Y = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t m = Y.shape[0], n = Y.shape[1], i, j
    out = np.zeros((m, n))
    cdef double[:, ::1] O = out
    if n == 1:
        return out
    for i in range(m):
        O[i, 0] = -Y[i, 0]
        for j in range(1, n - 1):
            O[i, j] = Y[i, j - 1] - Y[i, j]
        O[i, n - 1] = Y[i, n - 2]
    return out


cdef inline Py_ssize_t _reflect(Py_ssize_t idx, Py_ssize_t size) nogil:
    idx = idx % (2 * size)
    if idx < 0:
        idx += 2 * size
    if idx >= size:
        idx = 2 * size - 1 - idx
    return idx


cdef Py_ssize_t[::1] _index_table(Py_ssize_t size, Py_ssize_t r, bint symmetric):
    """Source index for each padded position, -1 where the zero rule applies."""
    table = np.empty(size + 2 * r, dtype=np.intp)
    cdef Py_ssize_t[::1] T = table
    cdef Py_ssize_t p, src
    for p in range(size + 2 * r):
        src = p - r
        if symmetric:
            T[p] = _reflect(src, size)
        elif 0 <= src < size:
            T[p] = src
        else:
            T[p] = -1
    return T


# Both kernels accumulate in the same order as the numpy fallback (kernel
# offsets outermost), so the two backends round identically.

def correlate2d(x, kernel, bint symmetric):
    cdef const double[:, ::1] X = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[:, ::1] Kr = np.ascontiguousarray(kernel, dtype=np.float64)
    cdef Py_ssize_t m = X.shape[0], n = X.shape[1]
    cdef Py_ssize_t kh = Kr.shape[0], kw = Kr.shape[1]
    cdef Py_ssize_t rh = kh // 2, rw = kw // 2
    cdef Py_ssize_t[::1] R = _index_table(m, rh, symmetric)
    cdef Py_ssize_t[::1] C = _index_table(n, rw, symmetric)
    cdef Py_ssize_t i, j, a, b
    cdef double kab
    padded = np.zeros((m + 2 * rh, n + 2 * rw))
    cdef double[:, ::1] P = padded
    for i in range(m + 2 * rh):
        if R[i] < 0:
            continue
        for j in range(n + 2 * rw):
            if C[j] >= 0:
                P[i, j] = X[R[i], C[j]]
    out = np.zeros((m, n))
    cdef double[:, ::1] O = out
    for a in range(kh):
        for b in range(kw):
            kab = Kr[a, b]
            for i in range(m):
                for j in range(n):
                    O[i, j] = O[i, j] + kab * P[i + a, j + b]
    return out


def correlate2d_adj(y, kernel, bint symmetric):
    cdef const double[:, ::1] Y = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double[:, ::1] Kr = np.ascontiguousarray(kernel, dtype=np.float64)
    cdef Py_ssize_t m = Y.shape[0], n = Y.shape[1]
    cdef Py_ssize_t kh = Kr.shape[0], kw = Kr.shape[1]
    cdef Py_ssize_t rh = kh // 2, rw = kw // 2
    cdef Py_ssize_t i, j, a, b, p, q
    cdef double kab
    spread = np.zeros((m + 2 * rh, n + 2 * rw))
    cdef double[:, ::1] S = spread
    for a in range(kh):
        for b in range(kw):
            kab = Kr[a, b]
            for i in range(m):
                for j in range(n):
                    S[i + a, j + b] = S[i + a, j + b] + kab * Y[i, j]
    if not symmetric:
        return np.ascontiguousarray(spread[rh:rh + m, rw:rw + n])
    cdef Py_ssize_t[::1] R = _index_table(m, rh, True)
    cdef Py_ssize_t[::1] C = _index_table(n, rw, True)
    folded = np.zeros((m, n + 2 * rw))
    cdef double[:, ::1] F = folded
    for p in range(m + 2 * rh):
        for q in range(n + 2 * rw):
            F[R[p], q] = F[R[p], q] + S[p, q]
    out = np.zeros((m, n))
    cdef double[:, ::1] O = out
    for q in range(n + 2 * rw):
        for i in range(m):
            O[i, C[q]] = O[i, C[q]] + F[i, q]
    return out


def soft_threshold(x, double thresh):
    arr = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] X = arr.reshape(-1)
    cdef Py_ssize_t k, size = X.shape[0]
    out = np.empty(size)
    cdef double[::1] O = out
    cdef double v
    for k in range(size):
        v = X[k]
        if v > thresh:
            O[k] = v - thresh
        elif v < -thresh:
            O[k] = v + thresh
        else:
            O[k] = 0.0
    return out.reshape(arr.shape)


def clip_abs(x, double bound):
    arr = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] X = arr.reshape(-1)
    cdef Py_ssize_t k, size = X.shape[0]
    out = np.empty(size)
    cdef double[::1] O = out
    cdef double v
    for k in range(size):
        v = X[k]
        if v < -bound:
            v = -bound
        if v > bound:
            v = bound
        O[k] = v
    return out.reshape(arr.shape)
