import sys

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "skewsim.engine._kernel_cy",
                ["src/skewsim/engine/_kernel_cy.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # The package falls back to the pure-Python kernel at import time.
    print("cython not available, building without the compiled kernel", file=sys.stderr)

setup(ext_modules=ext_modules)
