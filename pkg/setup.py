"""Build script for the compiled event-loop kernels.

The simulation inner loops live in ``alohasim/_core/_kernels.pyx``.  If the
extension cannot be built (no compiler, or ALOHASIM_PURE_PYTHON=1), the
package still installs and falls back to the pure-Python kernels at import
time; results are bit-identical, only slower.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("ALOHASIM_PURE_PYTHON"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext = Extension(
            "alohasim._core._kernels",
            ["src/alohasim/_core/_kernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
        ext_modules = cythonize([ext], language_level=3)
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
