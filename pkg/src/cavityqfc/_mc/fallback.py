"""NumPy implementations of the Monte Carlo inner loops.

Must stay semantically identical to ``_kernel.pyx``: same uniform-variate
consumption, same tie behavior (``searchsorted`` side='right', strict
``<`` click comparisons), so both backends give bit-identical results.
"""

import numpy as np


def thermal_clicks(u_pairs, u_herald, u_signal, pair_cdf, p_herald, p_signal):
    """Detector clicks for one block of time bins.

    ``pair_cdf[j] = P(n <= j)`` for the per-bin pair number; the lookup
    ``searchsorted(side='right')`` inverts it, the last table slot
    absorbing the truncated tail.  A detector clicks when its uniform
    variate falls below the click probability for the drawn ``n``.
    """
    n = np.searchsorted(pair_cdf, u_pairs, side="right")
    herald = (u_herald < p_herald[n]).view(np.uint8)
    signal = (u_signal < p_signal[n]).view(np.uint8)
    return herald, signal


def delay_histogram(herald, signal, max_delay):
    """Coincidence counts vs herald-to-signal bin delay in [-k, +k]."""
    n = herald.shape[0]
    k = int(max_delay)
    counts = np.zeros(2 * k + 1, dtype=np.int64)
    for d in range(-k, k + 1):
        if abs(d) >= n:
            continue
        if d >= 0:
            counts[d + k] = np.count_nonzero(herald[: n - d] & signal[d:])
        else:
            counts[d + k] = np.count_nonzero(herald[-d:] & signal[: n + d])
    return counts
