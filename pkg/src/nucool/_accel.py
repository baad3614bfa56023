"""JIT plumbing: numba decorators, or no-op stand-ins when disabled.

Set NUCOOL_DISABLE_JIT=1 to run the pure-numpy fallback paths everywhere
(useful for debugging and for machines without a working numba install).
The flag is read once at import time.
"""

import os

JIT_ENABLED = os.environ.get("NUCOOL_DISABLE_JIT", "0") not in ("1", "true", "yes")

if JIT_ENABLED:
    try:
        from numba import njit, prange
    except ImportError:  # pragma: no cover - numba is a hard dep, but be graceful
        JIT_ENABLED = False

if not JIT_ENABLED:
    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper

    def prange(*args):
        return range(*args)
