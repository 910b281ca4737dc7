import os
import subprocess
import sys

from permsym import kernels


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


def test_pure_python_switch():
    env = dict(os.environ, PERMSYM_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from permsym import kernels; print(kernels.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"
