"""Builds the optional compiled core; the package falls back to numpy without it."""

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("pseudochain._core", ["src/pseudochain/_core.pyx"],
                   include_dirs=[np.get_include()],
                   # plain complex multiply; no Annex G inf/nan recovery calls
                   extra_compile_args=["-O3", "-fcx-limited-range"],
                   define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
