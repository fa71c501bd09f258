"""Backend selection for the hot kernels.

``CARLEMAN_LAB_BACKEND=numpy`` forces the pure-numpy code path; the default
uses numba when it imports cleanly.  ``CARLEMAN_LAB_THREADS`` caps the thread
count handed to numba and BLAS.
"""

from __future__ import annotations

import os

_requested = os.environ.get("CARLEMAN_LAB_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"CARLEMAN_LAB_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

_threads = os.environ.get("CARLEMAN_LAB_THREADS")
if _threads:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMBA_NUM_THREADS"):
        os.environ.setdefault(var, _threads)

try:
    if _requested == "numpy":
        raise ImportError
    import numba

    HAVE_NUMBA = True
    njit = numba.njit(cache=True, nogil=True)
except ImportError:  # pragma: no cover - exercised via env flag
    HAVE_NUMBA = False

    def njit(fn):
        return fn


BACKEND = "numba" if HAVE_NUMBA else "numpy"


def threads() -> int:
    try:
        return max(1, int(_threads)) if _threads else 1
    except ValueError:
        return 1
