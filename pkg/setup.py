"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension; ``tailmc.kernels``
falls back to the numpy implementation when ``tailmc._kernels`` is absent.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "tailmc._kernels",
                ["src/tailmc/_kernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
