"""Numba toggle.

Set ``OSQ_DISABLE_NUMBA=1`` to route every kernel through the pure-numpy
implementation. Numba is also skipped when it cannot be imported.
"""
import os
import warnings

_DISABLED = os.environ.get("OSQ_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    import numba as _numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None
    HAVE_NUMBA = False
    warnings.warn("numba could not be imported; falling back to numpy kernels")

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(func):
    """``numba.njit`` with a fixed, deterministic configuration (no fastmath)."""
    if not HAVE_NUMBA:
        return func
    return _numba.njit(cache=True, fastmath=False)(func)
