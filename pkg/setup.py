"""Build script: compiles the optional C kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so a missing compiler downgrades the build instead of
failing it.
"""

import os
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "lipmatch._kernels",
                ["src/lipmatch/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    if os.environ.get("LIPMATCH_REQUIRE_EXT"):
        raise
    sys.stderr.write(f"lipmatch: building without C kernels ({exc})\n")

setup(ext_modules=ext_modules)
