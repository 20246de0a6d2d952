"""Build script for the optional compiled kernels.

The package works without the extension: ``levynet.kernels`` falls back
to the pure-Python implementations when the compiled module is missing.
"""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("LEVYNET_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - build without Cython
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "levynet._ckernels",
                    sources=["src/levynet/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
