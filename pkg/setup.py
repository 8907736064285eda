from setuptools import Extension, setup

# The compiled kernel core is optional: the package falls back to the pure
# Python kernels in membench.backends.reference when the extension is absent.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "membench.backends._fastcore",
                ["src/membench/backends/_fastcore.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
