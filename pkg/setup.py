"""Build script for the optional compiled kernels.

If Cython or a C compiler is unavailable the package still installs; the
pure-Python kernels are then selected at import time.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("NCDYN_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        extensions = [
            Extension(
                "ncdyn._kernels._heun_ext",
                ["src/ncdyn/_kernels/_heun_ext.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ]
        ext_modules = cythonize(
            extensions,
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
