"""Selects the box-sum backend at import time.

The compiled kernel is used when it was built and ``EPGIF_PURE_PYTHON``
is unset; otherwise the numpy fallback is used.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "numpy"
box_sum = _kernels_py.box_sum

if not os.environ.get("EPGIF_PURE_PYTHON"):
    try:
        from . import _kernels
    except ImportError:  # extension not built
        pass
    else:
        box_sum = _kernels.box_sum
        BACKEND = "cython"

__all__ = ["BACKEND", "box_sum"]
