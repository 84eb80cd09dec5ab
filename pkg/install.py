#!/usr/bin/env python3
"""Create the project's .venv and install the simulator's requirements into it."""

from __future__ import annotations

import argparse
import os
import shutil
import subprocess
import sys
from pathlib import Path
from typing import List, Optional, Tuple

PROJECT_ROOT = Path(__file__).resolve().parent
VENV_DIR = PROJECT_ROOT / ".venv"
REQUIREMENTS = PROJECT_ROOT / "requirements.txt"
SUPPORTED = ((3, 9), (3, 12))
REEXEC_FLAG = "REASON_SIM_INSTALL_REEXEC"
SMOKE_CHECK = "import numpy, scipy, matplotlib, reason_sim; print(reason_sim.__version__)"


def _run(cmd, **kwargs):
    print(f"[install] {' '.join(str(c) for c in cmd)}")
    subprocess.check_call(cmd, **kwargs)


def parse_args(argv: Optional[List[str]] = None):
    parser = argparse.ArgumentParser(description="Install reason_sim into a local virtual environment.")
    parser.add_argument("--reset", action="store_true", help="delete and rebuild .venv")
    parser.add_argument("--python", help="interpreter to build .venv from (overrides PYTHON env)")
    parser.add_argument("--skip-check", action="store_true",
                        help="do not import the package from .venv after installing")
    return parser.parse_args(argv)


def _version_ok(version: Tuple[int, int]) -> bool:
    low, high = SUPPORTED
    return low <= version <= high


def _window() -> str:
    (a, b), (c, d) = SUPPORTED
    return f"{a}.{b} to {c}.{d}"


def _venv_bin(name: str) -> Path:
    if os.name == "nt":
        return VENV_DIR / "Scripts" / f"{name}.exe"
    return VENV_DIR / "bin" / name


def interpreter_version(py: Path) -> Tuple[int, int]:
    out = subprocess.check_output(
        [str(py), "-c", "import sys; print(*sys.version_info[:2])"], text=True
    )
    major, minor = out.split()
    return int(major), int(minor)


def require_supported(py: Path):
    version = interpreter_version(py)
    if not _version_ok(version):
        raise RuntimeError(
            f"{py} is Python {version[0]}.{version[1]}; reason_sim supports {_window()}. "
            "Set PYTHON or pass --python, then re-run with --reset."
        )


def reexec_if_requested(requested: Optional[str]):
    """Hand over to the interpreter named by --python / PYTHON so .venv is built from it."""
    if not requested or os.environ.get(REEXEC_FLAG):
        return
    target = Path(requested)
    if not target.exists() or target.resolve() == Path(sys.executable).resolve():
        return
    env = dict(os.environ, **{REEXEC_FLAG: "1"})
    print(f"[install] re-running with {target}")
    _run([str(target), __file__, *sys.argv[1:]], env=env)
    sys.exit(0)


def base_interpreter(requested: Optional[str]) -> Path:
    # --python / PYTHON first, then an active conda env, then this interpreter
    candidates = [Path(requested)] if requested else []
    conda = os.environ.get("CONDA_PREFIX")
    if conda:
        candidates.append(Path(conda) / ("python.exe" if os.name == "nt" else "bin/python"))
    for cand in candidates:
        if cand.exists():
            return cand
    return Path(sys.executable)


def build_venv(base: Path, reset: bool) -> Path:
    if reset and VENV_DIR.exists():
        print(f"[install] removing {VENV_DIR}")
        shutil.rmtree(VENV_DIR, ignore_errors=True)
    if not VENV_DIR.exists():
        _run([str(base), "-m", "venv", str(VENV_DIR)])
    py = _venv_bin("python")
    if not py.exists():
        raise FileNotFoundError(f"{py} is missing; re-run with --reset")
    if not _venv_bin("pip").exists():
        _run([str(py), "-m", "ensurepip", "--upgrade"])
    return py


def install_requirements(py: Path):
    if not REQUIREMENTS.exists():
        raise FileNotFoundError(f"{REQUIREMENTS} is missing")
    pip = [str(py), "-m", "pip"]
    _run(pip + ["install", "--upgrade", "pip"])
    _run(pip + ["install", "-r", str(REQUIREMENTS)])


def main(argv: Optional[List[str]] = None):
    args = parse_args(argv)
    requested = args.python or os.environ.get("PYTHON")
    reexec_if_requested(requested)
    if not _version_ok(sys.version_info[:2]):
        raise RuntimeError(f"installer needs Python {_window()}")

    base = base_interpreter(requested)
    require_supported(base)
    py = build_venv(base, args.reset)
    require_supported(py)
    install_requirements(py)
    if not args.skip_check:
        _run([str(py), "-c", SMOKE_CHECK], cwd=str(PROJECT_ROOT))

    activate = VENV_DIR / ("Scripts/activate" if os.name == "nt" else "bin/activate")
    print(f"[install] done. Activate with:\n    {'' if os.name == 'nt' else 'source '}{activate}")
    print("[install] then run:\n    python -m reason_sim compare --config scenarios/default.toml --out results")


if __name__ == "__main__":
    main()
