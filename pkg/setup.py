import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "terrace._kernels",
                ["src/terrace/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    # Cython unavailable: install pure-python only, terrace._backend falls
    # back to the numpy kernels at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
