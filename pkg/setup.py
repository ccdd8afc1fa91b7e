import os

from setuptools import setup

ext_modules = []
if not os.environ.get("LOGKFL_NO_EXT"):
    try:
        from Cython.Build import cythonize
        import numpy
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "logkfl._elim",
                    ["src/logkfl/_elim.pyx"],
                    language="c++",
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3", "-std=c++17"],
                )
            ],
            compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
