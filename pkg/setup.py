"""Build the optional compiled kernel extension.

The package works without it (a pure-Python backend is selected at import
time), so a missing compiler or Cython only costs speed, not functionality.
Project metadata lives in pyproject.toml.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/aerotag/kernels/_core.pyx",
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    print("Cython not available; building without the compiled kernel core")
    ext_modules = []

setup(ext_modules=ext_modules)
