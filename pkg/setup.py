"""Build script: compiles the native kernel extension when possible.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile only costs speed.  Set DEPCENS_NO_EXT=1
to skip the extension build entirely.
"""

import os
import sys

from setuptools import setup

ext_modules = []
if not os.environ.get("DEPCENS_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "depcens._kernels._native",
                    ["src/depcens/_kernels/_native.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # pragma: no cover - build environment dependent
        sys.stderr.write(
            f"depcens: native kernel build skipped ({exc}); "
            "falling back to the NumPy backend\n"
        )
        ext_modules = []

setup(ext_modules=ext_modules)
