import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # fallback kernels are used when the extension is missing
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "lgorb._kernels._ckernels",
                ["src/lgorb/_kernels/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
