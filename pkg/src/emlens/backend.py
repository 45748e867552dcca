"""Kernel backend selection.

The compiled extension ``emlens._kernels`` is used when it imports; otherwise
the numpy implementation in ``emlens._fallback`` takes over.  Set
``EMLENS_BACKEND=python`` to force the fallback (``compiled`` makes a missing
extension an error).
"""

from __future__ import annotations

import os
import warnings
from types import ModuleType

from . import _fallback

KERNEL_NAMES = (
    "airy_values",
    "landau_ai",
    "landau_factors",
    "weighted_laguerre_rows",
    "series_reduce",
    "path_scan",
    "path_phase",
)


def _load(choice: str) -> tuple[ModuleType, str]:
    if choice == "python":
        return _fallback, "python"
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError as exc:
        if choice == "compiled":
            raise ImportError("EMLENS_BACKEND=compiled but emlens._kernels is not built") from exc
        warnings.warn("emlens._kernels not built; using the slow numpy fallback", RuntimeWarning, stacklevel=2)
        return _fallback, "python"
    return _kernels, "compiled"


_choice = os.environ.get("EMLENS_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "python", "compiled"):
    raise ValueError(f"EMLENS_BACKEND must be auto, python or compiled, got {_choice!r}")

kernels, BACKEND = _load(_choice)


def get(name: str, backend: str | None = None):
    """A kernel function from the active backend, or from ``backend`` explicitly."""
    if name not in KERNEL_NAMES:
        raise KeyError(name)
    if backend is None:
        mod = kernels
    else:
        mod = _load(backend)[0]
    return getattr(mod, name)
