import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "hierbayes.kernels._ballcount",
                ["src/hierbayes/kernels/_ballcount.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
