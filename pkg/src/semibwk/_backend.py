"""Kernel backend selection.

The numeric hot paths (the LP simplex and the pair-rounding loop) exist in two
builds compiled from the same source: a numba nopython build and the plain
Python/numpy build it falls back to.  The environment variable
``SEMIBWK_BACKEND`` picks the build:

* ``numba`` (default when numba imports cleanly) - JIT-compiled kernels,
* ``numpy`` - the interpreter-only fallback, bit-identical results.

``benchmarks/backend_bench.py`` times both builds side by side.
"""

from __future__ import annotations

import os
import warnings

_VALID = ("numba", "numpy")


def requested_backend() -> str:
    """Backend named by the environment, before availability checks."""
    name = os.environ.get("SEMIBWK_BACKEND", "numba").strip().lower()
    if name not in _VALID:
        raise ValueError(f"SEMIBWK_BACKEND must be one of {_VALID}, got {name!r}")
    return name


def _numba_jit():
    try:
        from numba import njit
    except ImportError:
        return None
    return njit


def resolve_backend() -> str:
    """Active backend name: the requested one, degraded to numpy if numba is absent."""
    name = requested_backend()
    if name == "numba" and _numba_jit() is None:
        warnings.warn("numba unavailable; falling back to the numpy backend", RuntimeWarning)
        return "numpy"
    return name


def compile_kernel(fn):
    """Return (numba_build_or_None, python_build) for one kernel source."""
    njit = _numba_jit()
    jitted = njit(cache=True)(fn) if njit is not None else None
    return jitted, fn


ACTIVE_BACKEND = resolve_backend()
