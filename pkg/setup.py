"""Build script for the optional Cython projection kernels.

The package is pure Python except for ``hadopt.projection._kernels``, a
compiled implementation of the four simplex-projection algorithms.  If
Cython or a C compiler is unavailable the extension is skipped and the
package falls back to the NumPy implementations at import time.
"""

import sys

from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    extensions = [
        Extension(
            "hadopt.projection._kernels",
            ["src/hadopt/projection/_kernels.pyx"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
    ]
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})
except ImportError as exc:  # pragma: no cover - build environment dependent
    print(f"warning: building without compiled projection kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
