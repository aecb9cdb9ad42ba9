"""Numba switch for the hot kernels.

Set ``SBMWALK_DISABLE_NUMBA=1`` before import to run every kernel through its
pure-numpy path. Both paths consume the same random stream and return
identical results.
"""
import os

_FLAG = os.environ.get("SBMWALK_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(func):
    """``numba.njit(cache=True, nogil=True)`` when enabled, identity otherwise."""
    if not USE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)
