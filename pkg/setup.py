import numpy
from setuptools import Extension, setup

# Build the compiled cell kernel when Cython is available. The package
# falls back to the pure python twin (expshock.kernel_py) at import time
# if the extension is missing, so a failed build is not fatal.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "expshock._kernel",
                ["src/expshock/_kernel.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
