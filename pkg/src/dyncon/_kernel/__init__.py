"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``DYNCON_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType
from typing import Optional

from . import _pykernel

Kernel = ModuleType

try:
    from . import _ckernel  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _ckernel = None

_FORCE_PURE = os.environ.get("DYNCON_PURE_PYTHON", "").strip() not in ("", "0")

if _ckernel is not None and not _FORCE_PURE:
    default = _ckernel
else:
    default = _pykernel

BACKEND = default.BACKEND


def available() -> list:
    """Names of importable kernels."""
    return ["python"] + (["cython"] if _ckernel is not None else [])


def get_kernel(name: Optional[str] = None) -> Kernel:
    """Kernel module by name (``"python"``, ``"cython"``) or the default."""
    if name is None:
        return default
    if name == "python":
        return _pykernel
    if name == "cython":
        if _ckernel is None:
            raise ImportError("compiled kernel is not built")
        return _ckernel
    raise ValueError(f"unknown kernel {name!r}")
