"""Backend parity: compiled kernel vs NumPy fallback.

Both backends transform identical uniform variates with table lookups and
comparisons only, so everything here asserts exact equality, not
statistical closeness.
"""

import os
import pickle
import subprocess
import sys

import numpy as np
import pytest

from cavityqfc import SourceModel, simulate_coincidences
from cavityqfc._mc import BACKEND_NAME, fallback

compiled = pytest.importorskip(
    "cavityqfc._mc._kernel", reason="compiled kernel not built"
)


def click_tables(mu=0.55, eta_h=0.1, eta_s=0.1, nu=0.01, n_max=60):
    ratio = mu / (1.0 + mu)
    n = np.arange(n_max + 1, dtype=float)
    cdf = 1.0 - ratio ** (n[:-1] + 1.0)
    p_h = 1.0 - (1.0 - eta_h) ** n
    p_s = 1.0 - (1.0 - eta_s) ** n * np.exp(-nu)
    return cdf, p_h, p_s


class TestKernelParity:
    def test_clicks_bit_identical(self):
        rng = np.random.default_rng(8)
        m = 250_000
        u = [rng.random(m) for _ in range(3)]
        tables = click_tables()
        h_c, s_c = compiled.thermal_clicks(*u, *tables)
        h_f, s_f = fallback.thermal_clicks(*u, *tables)
        assert np.array_equal(h_c, h_f)
        assert np.array_equal(s_c, s_f)
        assert h_c.dtype == np.uint8 and s_c.dtype == np.uint8

    def test_clicks_cdf_boundaries(self):
        # exact CDF values exercise the searchsorted tie rule
        tables = click_tables()
        cdf = tables[0]
        u = np.concatenate([cdf[:5], [0.0, np.nextafter(1.0, 0.0)]])
        uh = np.linspace(0.0, 0.99, u.size)
        us = uh[::-1].copy()
        h_c, s_c = compiled.thermal_clicks(u, uh, us, *tables)
        h_f, s_f = fallback.thermal_clicks(u, uh, us, *tables)
        assert np.array_equal(h_c, h_f)
        assert np.array_equal(s_c, s_f)

    def test_histogram_bit_identical(self):
        rng = np.random.default_rng(9)
        herald = (rng.random(100_000) < 0.05).astype(np.uint8)
        signal = (rng.random(100_000) < 0.08).astype(np.uint8)
        for k in (1, 7, 30):
            assert np.array_equal(
                compiled.delay_histogram(herald, signal, k),
                fallback.delay_histogram(herald, signal, k),
            )

    def test_histogram_against_brute_force(self):
        rng = np.random.default_rng(10)
        herald = (rng.random(500) < 0.3).astype(np.uint8)
        signal = (rng.random(500) < 0.3).astype(np.uint8)
        k = 6
        expected = np.zeros(2 * k + 1, dtype=np.int64)
        for i in range(500):
            for j in range(500):
                if herald[i] and signal[j] and abs(j - i) <= k:
                    expected[j - i + k] += 1
        assert np.array_equal(compiled.delay_histogram(herald, signal, k), expected)
        assert np.array_equal(fallback.delay_histogram(herald, signal, k), expected)

    def test_histogram_edges(self):
        herald = np.ones(5, dtype=np.uint8)
        signal = np.ones(5, dtype=np.uint8)
        expected = np.array([2, 3, 4, 5, 4, 3, 2], dtype=np.int64)
        assert np.array_equal(compiled.delay_histogram(herald, signal, 3), expected)
        assert np.array_equal(fallback.delay_histogram(herald, signal, 3), expected)

    def test_histogram_delay_span_beyond_length(self):
        herald = np.ones(4, dtype=np.uint8)
        signal = np.ones(4, dtype=np.uint8)
        wide_c = compiled.delay_histogram(herald, signal, 10)
        wide_f = fallback.delay_histogram(herald, signal, 10)
        assert np.array_equal(wide_c, wide_f)
        assert wide_c.sum() == 16  # every herald-signal pair counted once


class TestFullPipelineParity:
    def test_simulation_identical_across_backends(self):
        if BACKEND_NAME != "cython":
            pytest.skip("compiled backend not active in this process")
        # run the same model in a forced pure-python subprocess
        model = SourceModel(0.55, 0.1, 0.1, noise_rate_per_bin=0.01, bins=400_000, seed=123)
        native = simulate_coincidences(model, delay_span_bins=12, n_shards=3)
        script = (
            "import pickle, sys\n"
            "from cavityqfc import SourceModel, simulate_coincidences\n"
            "from cavityqfc.photon_stats import mc_backend_name\n"
            "model = SourceModel(0.55, 0.1, 0.1, noise_rate_per_bin=0.01,"
            " bins=400_000, seed=123)\n"
            "h = simulate_coincidences(model, delay_span_bins=12, n_shards=3)\n"
            "sys.stdout.buffer.write(pickle.dumps((mc_backend_name(), h.counts)))\n"
        )
        env = dict(os.environ, CAVITYQFC_PURE_PYTHON="1")
        out = subprocess.run(
            [sys.executable, "-c", script], env=env, capture_output=True, check=True
        )
        backend, counts = pickle.loads(out.stdout)
        assert backend == "numpy"
        assert BACKEND_NAME == "cython"
        assert np.array_equal(native.counts, counts)
