"""Kernel selection: the compiled extension when available, numpy otherwise.

Set ``FIBSPEC_PURE=1`` to force the numpy implementations.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("FIBSPEC_PURE", "") not in ("", "0"):
    kernels = _kernels_py
    NAME = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
        NAME = "cython"
    except ImportError:  # extension not built
        kernels = _kernels_py
        NAME = "python"

trace_pair = kernels.trace_pair
escape_index = kernels.escape_index
interval_escaped = kernels.interval_escaped
cocycle_half_trace = kernels.cocycle_half_trace
bisect_level = kernels.bisect_level
box_count = kernels.box_count
