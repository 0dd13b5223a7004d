"""Backend switch for the compiled kernels.

The numba backend is used when numba imports cleanly. Setting the
environment variable ``CBEDIGITS_BACKEND=numpy`` forces the vectorized
numpy implementations instead; both backends compute the same sums and
are cross-checked in the test suite.
"""
import os

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_requested = os.environ.get("CBEDIGITS_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"CBEDIGITS_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"

_threads = os.environ.get("CBEDIGITS_THREADS")
if HAVE_NUMBA and _threads:
    numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))


def njit(func):
    """Compile ``func`` in nopython mode when numba is present."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)
