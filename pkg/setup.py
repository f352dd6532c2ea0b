"""Build script: compiles the optional Cython core.

The package works without the extension (a numpy fallback is selected at
import time), so a failing C build must not fail the install.
"""

import sys

from setuptools import Extension, setup


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "fractw._core",
                ["src/fractw/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )


try:
    setup(ext_modules=_extensions())
except SystemExit:
    raise
except Exception as exc:  # compiler missing or broken: install pure-Python
    print(f"warning: building the C extension failed ({exc}); "
          "falling back to the pure-Python core", file=sys.stderr)
    setup(ext_modules=[])
