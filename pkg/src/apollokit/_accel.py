"""numba switch.

Set ``APOLLOKIT_DISABLE_NUMBA=1`` (before import) to force the pure-numpy
kernels. When numba is not importable the numpy path is used as well.
"""

import os

_DISABLED = os.environ.get("APOLLOKIT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False
    _njit = None

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` with caching, or a no-op decorator when numba is off."""
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    if _njit is None:
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f
    return _njit(*args, **kwargs)
