import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "cgkit._core._assignment",
                ["src/cgkit/_core/_assignment.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython: the package still works through the pure-Python kernel.
    extensions = []

setup(ext_modules=extensions)
