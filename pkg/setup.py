"""Build script for the compiled tick kernel.

The extension mirrors pulsebird.engine.simcore_py instruction for
instruction; both must produce bit-identical doubles.  -ffp-contract=off
forbids fused multiply-adds that would make the compiled kernel round
differently from the interpreter.
"""

from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "pulsebird.engine._simcore",
        ["src/pulsebird/engine/_simcore.pyx"],
        extra_compile_args=["-O2", "-ffp-contract=off"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
