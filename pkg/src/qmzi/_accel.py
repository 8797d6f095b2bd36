"""Backend selection for the hot kernels.

``QMZI_BACKEND=numpy`` forces the pure-numpy path; the default uses numba
when it can be imported.
"""
import os
import warnings

_requested = os.environ.get("QMZI_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    warnings.warn(f"unknown QMZI_BACKEND={_requested!r}, using numpy", RuntimeWarning)
    _requested = "numpy"

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _requested == "numba"


def njit(*args, **kws):
    """numba.njit(cache=True) when numba is importable, identity otherwise.

    Decorated functions are always compiled if numba exists, so both
    backends stay testable in one process; dispatch is done by the caller.
    """
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kws.setdefault("cache", True)
    return numba.njit(*args, **kws)


def backend():
    return "numba" if USE_NUMBA else "numpy"
