"""Build script for the optional compiled kernels.

The package works without the extension (a pure numpy/Python fallback is
selected at import time), so a failed extension build only costs speed.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "algdyn._kernels._fast",
                ["src/algdyn/_kernels/_fast.pyx"],
                include_dirs=[np.get_include()],
                # -ffp-contract=off keeps the compensated sums bit-identical
                # to the pure-Python backend (no FMA contraction).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
