"""Build script: compiles the optional Cython kernel extension.

The extension is a pure speed-up -- ``dacdelay._kernels`` falls back to a
NumPy reference implementation at import time when the compiled module is
unavailable, so a failed native build must not abort the install.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build extensions, downgrading native-toolchain failures to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - exercised only without a toolchain
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "WARNING: building the dacdelay._kernels._speedups extension failed "
            f"({exc!r}); the pure-Python kernels will be used instead."
        )


def _extensions():
    if os.environ.get("DACDELAY_PURE_PYTHON"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools.extension import Extension
    except ImportError:  # pragma: no cover
        return []
    return cythonize(
        [
            Extension(
                "dacdelay._kernels._speedups",
                ["src/dacdelay/_kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
