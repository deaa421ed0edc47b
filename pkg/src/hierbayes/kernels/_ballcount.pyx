# cython: boundscheck=False, wraparound=False, cdivision=True
"""Fused ball-counting kernel: squared distance + threshold histogram in one pass.

Avoids materialising the per-sample distance array, which matters when the
sample block is streamed in 10^6-row chunks.
"""

import numpy as np

cimport numpy as cnp

BACKEND = "cython"


def ball_counts(double[:, ::1] samples, double[::1] center, double[::1] sq_thresholds):
    cdef Py_ssize_t n = samples.shape[0]
    cdef Py_ssize_t d = samples.shape[1]
    cdef Py_ssize_t k = sq_thresholds.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hist = np.zeros(k + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] hv = hist
    cdef Py_ssize_t i, j, lo, hi, mid
    cdef double sq, diff

    for i in range(n):
        sq = 0.0
        for j in range(d):
            diff = samples[i, j] - center[j]
            sq += diff * diff
        # first threshold index with sq_thresholds[idx] >= sq
        lo = 0
        hi = k
        while lo < hi:
            mid = (lo + hi) // 2
            if sq_thresholds[mid] < sq:
                lo = mid + 1
            else:
                hi = mid
        hv[lo] += 1

    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.cumsum(hist[:k]).astype(np.int64)
    return counts
