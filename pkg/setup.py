import os

from setuptools import Extension, setup


def extensions():
    # UWBNLOS_NO_EXT=1 builds a pure-Python install.
    if os.environ.get("UWBNLOS_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "uwbnlos._ckernels",
        ["src/uwbnlos/_ckernels.pyx"],
        extra_compile_args=["-O3"],
        libraries=["m"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions())
