"""Build script for the compiled alignment kernel.

The extension is optional: if Cython or a C compiler is unavailable the
package installs anyway and falls back to the numpy kernel at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "trake._kernels._dante_cy",
                ["src/trake/_kernels/_dante_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
