"""Builds the nlod._core extension by delegating to the CMake project."""

import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str) -> None:
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        source_dir = Path(__file__).parent.resolve()
        build_temp = Path(self.build_temp).resolve()
        build_temp.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_temp),
                f"-DPython3_EXECUTABLE={sys.executable}",
                "-DCMAKE_BUILD_TYPE=Release",
                "-DNLOD_BUILD_PYTHON=ON",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_temp), "--target", "_core", "--parallel"],
            check=True,
        )

        # The module is staged under <build>/python/nlod by the CMake project.
        staged = sorted((build_temp / "python" / "nlod").glob("_core*"))
        if not staged:
            raise RuntimeError("CMake did not produce the nlod._core module")
        target = Path(self.get_ext_fullpath(ext.name)).resolve()
        target.parent.mkdir(parents=True, exist_ok=True)
        self.copy_file(str(staged[0]), str(target))


setup(ext_modules=[CMakeExtension("nlod._core")], cmdclass={"build_ext": CMakeBuild})
