"""Build the optional compiled kernel.

The extension is marked optional: when Cython or a C compiler is missing the
package still installs and falls back to the pure-Python engine.
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "nsga2_approx._kernel",
                ["src/nsga2_approx/_kernel.pyx"],
                include_dirs=[np.get_include()],
                # no -ffast-math / fp contraction: results must match the Python engine bit for bit
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )

setup(ext_modules=ext_modules)
