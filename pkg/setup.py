"""Build script: compiles the optional denoise gate extension when Cython is present.

The package works without the extension; agentrig.denoise falls back to the
pure-Python kernels at import time. Set AGENTRIG_NO_EXTENSION=1 to skip the
build explicitly.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("AGENTRIG_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("agentrig.denoise._gates", ["src/agentrig/denoise/_gates.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
