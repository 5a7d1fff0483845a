"""Build script for the optional compiled stepper kernel.

The ETDRK4 inner loop is available in two interchangeable forms: a Cython
extension linked against FFTW (fast path) and a pure-numpy implementation.
If the extension cannot be built (no compiler, no fftw3), the install
falls through to the pure-Python backend; nothing else changes.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the kernel if possible, degrade to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler / headers
            print(f"gkdvlab: skipping compiled kernel ({exc}); "
                  "pure-Python backend will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"gkdvlab: could not compile {ext.name} ({exc}); "
                  "pure-Python backend will be used")


def make_extensions():
    if os.environ.get("GKDV_NO_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "gkdvlab.evolver._kernel",
        ["src/gkdvlab/evolver/_kernel.pyx"],
        include_dirs=[numpy.get_include()],
        libraries=["fftw3", "m"],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={
        "boundscheck": False, "wraparound": False, "cdivision": True,
        "language_level": 3,
    })


setup(
    ext_modules=make_extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
