"""Build script for the compiled box-kernel extension.

The extension is optional: when it is absent (no compiler, no Cython) the
package falls back to the pure-Python kernels at import time. Build in place
with:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "aerialsynth.kernels._box_ops",
                sources=["src/aerialsynth/kernels/_box_ops.pyx"],
            )
        ],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
