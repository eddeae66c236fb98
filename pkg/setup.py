import os

from setuptools import setup

ext_modules = []
if os.environ.get("SECOFF_NO_EXT", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass  # pure-Python fallback is used at import
    else:
        ext_modules = cythonize(
            [Extension("secoff._kernels", ["src/secoff/_kernels.pyx"],
                       include_dirs=[np.get_include()],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
