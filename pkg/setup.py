from setuptools import Extension, setup

# The compiled kernels are optional: without Cython (or a working compiler)
# the package installs pure-Python and bornsim.backend falls back at import.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bornsim._kernels",
                ["src/bornsim/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
