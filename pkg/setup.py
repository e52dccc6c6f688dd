"""Build script: compiles the optional Cython kernel when Cython is available."""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("STABLE_STEIN_PURE_PYTHON"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("stablestein._ckernels", ["src/stablestein/_ckernels.pyx"],
                       include_dirs=[numpy.get_include()], extra_compile_args=["-O3"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
