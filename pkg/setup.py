"""Build script: compiles the optional Cython jet kernel.

The package is fully functional without the extension (a pure-Python
backend is selected at import time); set SASAKLAB_PURE=1 to skip the
compile step entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Never fail the install because the C toolchain is missing."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: skipping compiled jet kernel ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: could not build {ext.name} ({exc}); "
                  "falling back to the pure-Python jets")


PYX = "src/sasaklab/jets/_jets_cy.pyx"

ext_modules = []
if os.environ.get("SASAKLAB_PURE") != "1" and os.path.exists(PYX):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "sasaklab.jets._jets_cy",
                    [PYX],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
            },
        )
    except ImportError:  # pragma: no cover - cython not installed
        ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
