import os

from setuptools import setup

ext_modules = []
if os.environ.get("SURFACE_MARKOV_PURE") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass  # the package falls back to the pure-Python kernels
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "surface_markov._kernels",
                    ["src/surface_markov/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O2"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
