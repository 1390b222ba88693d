"""Build hook for the optional Cython kernels.

The package works without a compiler: ``jra.kernels`` falls back to the
pure-Python implementations when the extension is missing.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("JRA_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "jra._core",
                    ["src/jra/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
