"""Build script for the optional compiled Monte Carlo kernel.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); building it just makes the coincidence simulator
faster.  Set CAVITYQFC_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CAVITYQFC_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "cavityqfc._mc._kernel",
                    ["src/cavityqfc/_mc/_kernel.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
