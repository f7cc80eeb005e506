"""Kernel backend selection.

Prefers the compiled Cython kernels; falls back to the pure-Python
reference implementation when the extension is unavailable or when
ALOHASIM_BACKEND=python is set.  Both backends are draw-for-draw
identical, so traces do not depend on which one is active.
"""
import os

from . import _kernels_py

if os.environ.get("ALOHASIM_BACKEND", "").lower() == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

finite_kernel = _impl.finite_kernel
slotted_kernel = _impl.slotted_kernel

PKT_CONSTANT = _kernels_py.PKT_CONSTANT
PKT_EXPONENTIAL = _kernels_py.PKT_EXPONENTIAL
PKT_TRUNC_EXPONENTIAL = _kernels_py.PKT_TRUNC_EXPONENTIAL
PKT_GAMMA = _kernels_py.PKT_GAMMA
