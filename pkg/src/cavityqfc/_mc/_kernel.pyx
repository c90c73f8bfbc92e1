# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner loops for the coincidence simulator.

Semantics must match ``fallback.py`` exactly: the binary search below is
``searchsorted(side='right')`` and clicks use strict ``<``, so both
backends produce bit-identical output from the same uniform variates.
"""

import numpy as np


def thermal_clicks(const double[::1] u_pairs, const double[::1] u_herald,
                   const double[::1] u_signal, const double[::1] pair_cdf,
                   const double[::1] p_herald, const double[::1] p_signal):
    """Detector clicks for one block of time bins; see the fallback docs."""
    cdef Py_ssize_t m = u_pairs.shape[0]
    cdef Py_ssize_t k = pair_cdf.shape[0]
    herald_arr = np.empty(m, dtype=np.uint8)
    signal_arr = np.empty(m, dtype=np.uint8)
    cdef unsigned char[::1] herald = herald_arr
    cdef unsigned char[::1] signal = signal_arr
    cdef Py_ssize_t i, lo, hi, mid
    cdef double u
    for i in range(m):
        u = u_pairs[i]
        lo = 0
        hi = k
        while lo < hi:
            mid = (lo + hi) >> 1
            if pair_cdf[mid] <= u:
                lo = mid + 1
            else:
                hi = mid
        herald[i] = 1 if u_herald[i] < p_herald[lo] else 0
        signal[i] = 1 if u_signal[i] < p_signal[lo] else 0
    return herald_arr, signal_arr


def delay_histogram(const unsigned char[::1] herald,
                    const unsigned char[::1] signal,
                    Py_ssize_t max_delay):
    """Coincidence counts vs herald-to-signal bin delay in [-k, +k]."""
    cdef Py_ssize_t n = herald.shape[0]
    counts_arr = np.zeros(2 * max_delay + 1, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef Py_ssize_t i, j, lo, hi
    for i in range(n):
        if herald[i]:
            lo = i - max_delay
            if lo < 0:
                lo = 0
            hi = i + max_delay
            if hi > n - 1:
                hi = n - 1
            for j in range(lo, hi + 1):
                if signal[j]:
                    counts[j - i + max_delay] += 1
    return counts_arr
