"""Backend selection for the hot kernels.

Every kernel in _kernels.py ships in two builds: a numba @njit build and a
pure-numpy fallback. The environment variable STARFIX_BACKEND picks one:

    STARFIX_BACKEND=numpy   force the fallback (no compilation)
    STARFIX_BACKEND=numba   require numba, fail loudly if it is missing
    unset / empty           numba when importable, numpy otherwise

The flag is read once at import time so a whole process runs on one backend.
"""

from __future__ import annotations

import os

_requested = os.environ.get("STARFIX_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"STARFIX_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    NUMBA_ENABLED = False
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        if _requested == "numba":
            raise
        NUMBA_ENABLED = False

BACKEND = "numba" if NUMBA_ENABLED else "numpy"
