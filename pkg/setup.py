"""Build script for the compiled kernel extension.

The pure-Python fallback in hopshort._kernels.pure makes the extension
optional: if the build is skipped the package still works, just slower.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "hopshort._kernels._speed",
        ["src/hopshort/_kernels/_speed.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
)
