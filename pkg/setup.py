"""Build the optional compiled kernels.

The package works without the extension (a pure-numpy fallback is selected at
import time), so a failing compile only costs speed, not functionality.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Degrade to the pure-Python fallback when no compiler is available."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing toolchain
            print(f"warning: skipping compiled kernels ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); using fallback")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "lorembed._speedups",
                ["src/lorembed/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
