"""Backend selection for the coincidence-simulation inner loops.

The compiled Cython kernel is preferred when it was built; otherwise a
vectorized NumPy fallback with identical semantics is used.  Both consume
the same pre-drawn uniform variates and perform only table lookups and
comparisons, so they produce bit-identical click streams and histograms.
Set ``CAVITYQFC_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("CAVITYQFC_PURE_PYTHON"):
    from . import fallback as backend

    BACKEND_NAME = "numpy"
else:
    try:
        from . import _kernel as backend  # type: ignore[attr-defined]

        BACKEND_NAME = "cython"
    except ImportError:
        from . import fallback as backend

        BACKEND_NAME = "numpy"

thermal_clicks = backend.thermal_clicks
delay_histogram = backend.delay_histogram

__all__ = ["BACKEND_NAME", "thermal_clicks", "delay_histogram", "backend"]
