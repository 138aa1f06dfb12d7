"""Kernel backend selection.

The numerical hot paths (the dense SDP interior-point core in ``_ipm`` and the
oracle's pattern-search kernel) are written in a numba-compatible subset of
numpy. At import time this module picks a backend:

* ``numba``  (default when importable): kernels are compiled with ``@njit``.
* ``numpy``: the same source runs as plain Python/numpy. Slower, but
  dependency-free and byte-for-byte the same algorithm.

Select explicitly with the environment variable ``SECRELAY_BACKEND=numba`` or
``SECRELAY_BACKEND=numpy`` before the first import. The choice is fixed for
the lifetime of the process; benchmarks compare backends across subprocesses.
"""

from __future__ import annotations

import os

ENV_VAR = "SECRELAY_BACKEND"

try:
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only on stripped installs
    numba = None
    NUMBA_AVAILABLE = False


def _resolve_backend() -> str:
    requested = os.environ.get(ENV_VAR, "").strip().lower()
    if requested == "":
        return "numba" if NUMBA_AVAILABLE else "numpy"
    if requested not in ("numba", "numpy"):
        raise ValueError(
            f"{ENV_VAR} must be 'numba' or 'numpy', got {requested!r}"
        )
    if requested == "numba" and not NUMBA_AVAILABLE:
        raise ValueError(f"{ENV_VAR}=numba requested but numba is not importable")
    return requested


ACTIVE_BACKEND = _resolve_backend()

if ACTIVE_BACKEND == "numba":
    # cache=True persists compiled kernels across processes, which keeps the
    # test suite and CLI start-up from paying the compile cost repeatedly.
    def jit_kernel(func):
        return numba.njit(cache=True)(func)

else:

    def jit_kernel(func):
        return func
