"""Builds the compiled kernel core.

The extension is optional at runtime: hushlab.kernels falls back to the
pure-Python reference implementation when the module is absent.  Flags
deliberately exclude -ffast-math and FMA-enabling arch options so both
backends produce bit-identical IEEE-double results.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

ext_modules = [
    Extension(
        "hushlab.kernels._native",
        sources=["src/hushlab/kernels/_native.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O2"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(ext_modules, language_level=3))
