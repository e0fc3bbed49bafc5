"""Pure numpy implementations of the hot array kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature.
Both backends perform the same floating point operations in the same order,
so they agree bit for bit.
"""

import numpy as np


def diff_rows(u):
    out = np.zeros_like(u)
    out[:-1] = u[1:] - u[:-1]
    return out


def diff_rows_adj(y):
    out = np.zeros_like(y)
    m = y.shape[0]
    if m == 1:
        return out
    out[0] = -y[0]
    out[1:-1] = y[:-2] - y[1:-1]
    out[-1] = y[-2]
    return out


def diff_cols(u):
    out = np.zeros_like(u)
    out[:, :-1] = u[:, 1:] - u[:, :-1]
    return out


def diff_cols_adj(y):
    out = np.zeros_like(y)
    n = y.shape[1]
    if n == 1:
        return out
    out[:, 0] = -y[:, 0]
    out[:, 1:-1] = y[:, :-2] - y[:, 1:-1]
    out[:, -1] = y[:, -2]
    return out


def reflect_index(idx, size):
    """Map (possibly out-of-range) indices onto ``[0, size)`` by
    half-sample symmetric reflection, the rule of ``np.pad(mode='symmetric')``."""
    idx = np.mod(idx, 2 * size)
    return np.where(idx >= size, 2 * size - 1 - idx, idx)


def _pad(x, rh, rw, symmetric):
    mode = "symmetric" if symmetric else "constant"
    return np.pad(x, ((rh, rh), (rw, rw)), mode=mode)


def correlate2d(x, kernel, symmetric):
    kh, kw = kernel.shape
    rh, rw = kh // 2, kw // 2
    m, n = x.shape
    padded = _pad(x, rh, rw, symmetric)
    out = np.zeros_like(x)
    for a in range(kh):
        for b in range(kw):
            out += kernel[a, b] * padded[a:a + m, b:b + n]
    return out


def correlate2d_adj(y, kernel, symmetric):
    kh, kw = kernel.shape
    rh, rw = kh // 2, kw // 2
    m, n = y.shape
    spread = np.zeros((m + 2 * rh, n + 2 * rw))
    for a in range(kh):
        for b in range(kw):
            spread[a:a + m, b:b + n] += kernel[a, b] * y
    if not symmetric:
        return np.ascontiguousarray(spread[rh:rh + m, rw:rw + n])
    rows = reflect_index(np.arange(-rh, m + rh), m)
    cols = reflect_index(np.arange(-rw, n + rw), n)
    folded = np.zeros((m, n + 2 * rw))
    np.add.at(folded, rows, spread)
    out = np.zeros((n, m))
    np.add.at(out, cols, folded.T)
    return np.ascontiguousarray(out.T)


def soft_threshold(x, thresh):
    return np.where(x > thresh, x - thresh, np.where(x < -thresh, x + thresh, 0.0))


def clip_abs(x, bound):
    return np.minimum(np.maximum(x, -bound), bound)
