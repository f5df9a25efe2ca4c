"""Optional numba acceleration.

Set ``INFOCHECK_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when
numba is importable.
"""

import os

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional speedup
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def _identity(fn):
            return fn

        return _identity


def _flag(name):
    return os.environ.get(name, "").strip().lower() not in ("", "0", "false", "no")


NUMBA_DISABLED = _flag("INFOCHECK_DISABLE_NUMBA")
USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED
DEFAULT_BACKEND = "numba" if USE_NUMBA else "numpy"

__all__ = ["njit", "HAVE_NUMBA", "USE_NUMBA", "DEFAULT_BACKEND"]
