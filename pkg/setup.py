"""Build script for the optional compiled kernels.

If the extension cannot be compiled the package still installs and the
numpy fallback in ``emlens._fallback`` is used at import time.
"""

import sys

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure falls back
            print(f"warning: emlens._kernels not built ({exc}); using the numpy fallback", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: building {ext.name} failed ({exc}); using the numpy fallback", file=sys.stderr)


try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build without Cython
    extensions = []
else:
    extensions = cythonize(
        [
            Extension(
                "emlens._kernels",
                ["src/emlens/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O2"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
