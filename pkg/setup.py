"""Build hook for the optional compiled n-gram kernel.

The package works without the extension; sim falls back to the pure
Python kernel when the build or import fails.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "symgen._ngram",
                sources=["src/symgen/_ngram.pyx"],
                language="c++",
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
