"""Build script for the compiled extension.

The core library and the bindings compile together into a single module,
``gridlab._core``. Metadata lives in pyproject.toml; this file only describes
the extension. Works with ``pip install --no-build-isolation .`` as long as
setuptools and pybind11 are importable.
"""

from glob import glob

from pybind11.setup_helpers import ParallelCompile, Pybind11Extension, build_ext
from setuptools import setup

ParallelCompile("NPY_NUM_BUILD_JOBS", default=4).install()

extension = Pybind11Extension(
    "gridlab._core",
    sources=sorted(glob("src/*.cpp")) + ["python/bindings.cpp"],
    include_dirs=["include", "vendor"],
    cxx_std=20,
)

setup(ext_modules=[extension], cmdclass={"build_ext": build_ext})
