"""Numba acceleration shim.

Hot numeric kernels (simplex pivoting, Jacobi eigensolver) are written once
and compiled with numba when available. Setting VCONE_NO_NUMBA=1 (or numba
being absent) selects the identical pure-numpy/python code path.
"""
import os

_disabled = os.environ.get("VCONE_NO_NUMBA", "").lower() in ("1", "true", "yes")

if not _disabled:
    try:
        from numba import njit as _njit
        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False


def maybe_njit(fn):
    if NUMBA_ENABLED:
        return _njit(cache=True)(fn)
    return fn
