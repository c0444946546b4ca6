"""Numba switch.

Hot kernels are compiled with ``numba.njit`` unless numba is missing or the
environment variable ``JETIGNITE_DISABLE_JIT`` is set to a truthy value, in
which case the pure-numpy implementations are used instead.
"""

import os

ENV_FLAG = "JETIGNITE_DISABLE_JIT"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _flag_set():
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


USE_JIT = HAVE_NUMBA and not _flag_set()


def njit_opts():
    return dict(cache=True, nogil=True, fastmath=False, error_model="numpy")


def maybe_njit(fn):
    """Compile ``fn`` with numba when available, else return None."""
    if not HAVE_NUMBA:
        return None
    return numba.njit(**njit_opts())(fn)


def backend_name():
    return "numba" if USE_JIT else "numpy"
