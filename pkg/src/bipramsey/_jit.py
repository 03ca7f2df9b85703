"""Numba switch.

Set ``BIPRAMSEY_NO_NUMBA=1`` to run every kernel as plain Python/numpy.
"""
import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

NUMBA_ENABLED = HAS_NUMBA and os.environ.get("BIPRAMSEY_NO_NUMBA", "0") in ("", "0")


def njit(fn):
    """Compile ``fn`` in nopython mode when numba is enabled, else return it untouched.

    The undecorated function is always reachable as ``fn.py_func``.
    """
    if not NUMBA_ENABLED:
        fn.py_func = fn
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
