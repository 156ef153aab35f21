"""Builds the optional Cython entropy coder; the package works without it."""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            self.warn(f"compiled extension skipped, using pure-Python fallback: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self.warn(f"building {ext.name} failed, using pure-Python fallback: {exc}")


def extensions():
    if os.environ.get("DCTPURIFY_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    exts = [
        Extension(
            "dctpurify.jpeg._entropy",
            ["src/dctpurify/jpeg/_entropy.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )
    ]
    try:
        return cythonize(exts, compiler_directives={"language_level": "3"})
    except Exception as exc:  # noqa: BLE001
        print(f"cythonize failed, using pure-Python fallback: {exc}")
        return []


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
