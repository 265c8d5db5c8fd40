"""Build config for the optional compiled LSTM kernels.

The extension is marked optional: if no C toolchain is available the
install still succeeds and the package falls back to the pure-numpy
kernels at import time.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "cryptocast.nn.kernels._lstm",
                ["src/cryptocast/nn/kernels/_lstm.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
