"""Build script for the compiled estimator kernel.

The package works without the extension (a pure-Python twin is selected at
import time), so a failed compile should not block installation in exotic
environments; building from sdist/checkout with Cython present produces the
fast path.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "offloadsim._estimator_cy",
                ["src/offloadsim/_estimator_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
