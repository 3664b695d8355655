"""Kernel backend selection.

The compiled extension is preferred; set ``SADDLESVM_BACKEND=python`` to
force the NumPy fallback, or ``SADDLESVM_BACKEND=cython`` to insist on the
extension (raising if it is unavailable).
"""
import os

_choice = os.environ.get("SADDLESVM_BACKEND", "auto")

if _choice in ("auto", "cython"):
    try:
        from . import _core as kernels  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "cython":
            raise
        from . import _core_py as kernels
elif _choice == "python":
    from . import _core_py as kernels
else:
    raise ValueError(f"unknown SADDLESVM_BACKEND value {_choice!r}")

BACKEND = kernels.BACKEND
