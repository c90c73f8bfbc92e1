#!/usr/bin/env python3
"""Benchmark the coincidence-simulator kernels: compiled vs NumPy fallback.

Usage:
    python benchmarks/bench_mc.py [--bins N] [--repeats R]

Times the two inner loops (click generation from uniform variates, delay
histogramming) on identical inputs, then the end-to-end simulator through
each backend.  Outputs are checked for bit-identity while timing.
"""

import argparse
import time

import numpy as np

from cavityqfc._mc import fallback

try:
    from cavityqfc._mc import _kernel as compiled
except ImportError:
    compiled = None


def timeit(fn, repeats):
    best = np.inf
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def click_tables(mu=0.55, eta=0.1, nu=0.01, n_max=60):
    ratio = mu / (1.0 + mu)
    n = np.arange(n_max + 1, dtype=float)
    cdf = 1.0 - ratio ** (n[:-1] + 1.0)
    p_h = 1.0 - (1.0 - eta) ** n
    p_s = 1.0 - (1.0 - eta) ** n * np.exp(-nu)
    return cdf, p_h, p_s


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--bins", type=int, default=4_000_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    uniforms = [rng.random(args.bins) for _ in range(3)]
    tables = click_tables()

    print(f"bins = {args.bins:,}, best of {args.repeats}")
    print(f"{'stage':<22}{'numpy':>12}{'cython':>12}{'speedup':>10}")

    t_np, (h_np, s_np) = timeit(lambda: fallback.thermal_clicks(*uniforms, *tables),
                                args.repeats)
    if compiled is not None:
        t_cy, (h_cy, s_cy) = timeit(lambda: compiled.thermal_clicks(*uniforms, *tables),
                                    args.repeats)
        assert np.array_equal(h_np, h_cy) and np.array_equal(s_np, s_cy)
        print(f"{'thermal_clicks':<22}{t_np:>11.3f}s{t_cy:>11.3f}s{t_np / t_cy:>9.1f}x")
    else:
        print(f"{'thermal_clicks':<22}{t_np:>11.3f}s{'n/a':>12}")

    t_np, counts_np = timeit(lambda: fallback.delay_histogram(h_np, s_np, 30),
                             args.repeats)
    if compiled is not None:
        t_cy, counts_cy = timeit(lambda: compiled.delay_histogram(h_np, s_np, 30),
                                 args.repeats)
        assert np.array_equal(counts_np, counts_cy)
        print(f"{'delay_histogram':<22}{t_np:>11.3f}s{t_cy:>11.3f}s{t_np / t_cy:>9.1f}x")
    else:
        print(f"{'delay_histogram':<22}{t_np:>11.3f}s{'n/a':>12}")

    # end-to-end through the public simulator, one backend per subprocess
    import pickle
    import subprocess
    import sys

    script = (
        "import pickle, sys, time\n"
        "from cavityqfc import SourceModel, simulate_coincidences\n"
        f"model = SourceModel(0.55, 0.1, 0.1, bins={args.bins}, seed=0)\n"
        "start = time.perf_counter()\n"
        "h = simulate_coincidences(model)\n"
        "elapsed = time.perf_counter() - start\n"
        "sys.stdout.buffer.write(pickle.dumps((elapsed, h.counts)))\n"
    )

    def run(pure):
        import os

        env = dict(os.environ)
        if pure:
            env["CAVITYQFC_PURE_PYTHON"] = "1"
        else:
            env.pop("CAVITYQFC_PURE_PYTHON", None)
        out = subprocess.run([sys.executable, "-c", script], env=env,
                             capture_output=True, check=True)
        return pickle.loads(out.stdout)

    t_np, counts_np = run(pure=True)
    if compiled is not None:
        t_cy, counts_cy = run(pure=False)
        assert np.array_equal(counts_np, counts_cy)
        print(f"{'simulate end-to-end':<22}{t_np:>11.3f}s{t_cy:>11.3f}s{t_np / t_cy:>9.1f}x")
    else:
        print(f"{'simulate end-to-end':<22}{t_np:>11.3f}s{'n/a':>12}")


if __name__ == "__main__":
    main()
