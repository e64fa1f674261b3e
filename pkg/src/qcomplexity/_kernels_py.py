"""Pure-numpy fallback for the compiled kernels, operation-for-operation equivalent."""

import numpy as np


def row_power_sums(M, p):
    M = np.ascontiguousarray(M, dtype=np.float64)
    a = np.abs(M)
    if p == 2.0:
        a = a * a
    elif p != 1.0:
        a = np.power(a, p)
    s = np.zeros(M.shape[0])
    c = np.zeros(M.shape[0])
    for j in range(M.shape[1]):
        x = a[:, j]
        t = s + x
        c = c + np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)
        s = t
    return s + c


def _sup_abs(F, negate):
    # negate: bool (B, m); accumulate rows of F in index order like the C loop
    acc = np.zeros((negate.shape[0], F.shape[1]))
    for i in range(F.shape[0]):
        acc = acc + np.where(negate[:, i : i + 1], -F[i], F[i])
    if F.shape[1] == 0:
        return np.zeros(negate.shape[0])
    return np.abs(acc).max(axis=1)


def sup_abs_exact(F, start, count):
    F = np.ascontiguousarray(F, dtype=np.float64)
    m = F.shape[0]
    k = np.arange(start, start + count, dtype=np.int64)
    bits = np.arange(m, dtype=np.int64)
    negate = ((k[:, None] >> bits[None, :]) & 1).astype(bool)
    if m:
        negate[:, m - 1] = False
    return _sup_abs(F, negate)


def sup_abs_words(F, words):
    F = np.ascontiguousarray(F, dtype=np.float64)
    words = np.ascontiguousarray(words, dtype=np.uint64)
    i = np.arange(F.shape[0])
    w = words[:, i >> 6]
    negate = ((w >> (i & 63).astype(np.uint64)) & np.uint64(1)).astype(bool)
    return _sup_abs(F, negate)
