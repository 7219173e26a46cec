"""Build script. The pure-Python package works as is; this additionally
compiles the de-skew solver kernel when Cython and a C compiler are present.

Set SKEWLAB_NO_EXT=1 to skip the extension entirely (the package falls back
to the Python kernel at import time).
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SKEWLAB_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "skewlab._kernels._deskew_cy",
                    ["src/skewlab/_kernels/_deskew_cy.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )

setup(ext_modules=ext_modules)
