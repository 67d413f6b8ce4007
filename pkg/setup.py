"""Build script for the optional Cython kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), but the compiled kernels are the supported configuration for
benchmark runs.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "bnnbench._kernels.cykernels",
        sources=["src/bnnbench/_kernels/cykernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level="3"))
