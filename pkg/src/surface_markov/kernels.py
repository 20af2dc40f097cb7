"""Selects the compiled kernels when built, else the pure-Python ones.

Set ``SURFACE_MARKOV_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

if os.environ.get("SURFACE_MARKOV_PURE") == "1":
    from ._kernels_py import BACKEND, next_sphere, power_iteration
else:
    try:
        from ._kernels import BACKEND, next_sphere, power_iteration  # type: ignore[import-not-found]
    except ImportError:  # extension not built
        from ._kernels_py import BACKEND, next_sphere, power_iteration

from ._kernels_py import CLASS_OVERFLOW, GEODESIC, NOT_GEODESIC

__all__ = ["BACKEND", "next_sphere", "power_iteration", "CLASS_OVERFLOW", "GEODESIC", "NOT_GEODESIC"]
