"""Engine selection: the compiled kernel when it imports, else pure Python.

``NSGA2_APPROX_PURE=1`` in the environment forces the pure-Python engine.
"""
from __future__ import annotations

import os

try:
    from . import _kernel
except ImportError:  # extension not built
    _kernel = None

FORCE_PURE = os.environ.get("NSGA2_APPROX_PURE", "") == "1"
BACKEND = "python" if FORCE_PURE or _kernel is None else "compiled"


def compiled_available() -> bool:
    return _kernel is not None


def kernel():
    if _kernel is None:
        raise RuntimeError("compiled kernel is not available; rebuild with `pip install -e .`")
    return _kernel


def resolve(name: str) -> str:
    if name == "auto":
        return BACKEND
    if name not in ("python", "compiled"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "compiled":
        kernel()
    return name
