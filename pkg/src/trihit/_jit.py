"""Optional numba acceleration.

Set ``TRIHIT_DISABLE_NUMBA=1`` to run every kernel through its pure numpy
implementation instead.  The flag is read once at import time.
"""
from __future__ import annotations

import os

_FLAG = "TRIHIT_DISABLE_NUMBA"


def numba_requested() -> bool:
    return os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes")


try:  # pragma: no cover - depends on the environment
    if not numba_requested():
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _njit = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, otherwise a no-op decorator."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return _njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda fn: fn


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
