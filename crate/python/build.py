"""Builds the extension in release mode and copies it next to this script."""

import shutil
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
ROOT = HERE.parent


def main() -> int:
    subprocess.run(["cargo", "build", "--release", "-p", "rumourlab-py"], cwd=ROOT, check=True)
    lib = {"linux": "librumourlab_py.so", "darwin": "librumourlab_py.dylib"}.get(sys.platform, "rumourlab_py.dll")
    target = HERE / ("rumourlab_py.pyd" if sys.platform == "win32" else "rumourlab_py.so")
    shutil.copyfile(ROOT / "target" / "release" / lib, target)
    print(f"copied {lib} to {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
