"""Backend selection: JIT-compiled kernels (numba) vs. pure-numpy fallbacks.

Every hot kernel in this package exists in two functionally identical
versions: a numba ``@njit`` loop and a vectorized pure-numpy
implementation.  The active default is chosen once at import time from the
environment variable ``PRIMELAB_BACKEND``:

* unset or ``"auto"``  -- use numba if it imports, else numpy;
* ``"numba"``          -- require numba (warn and fall back if missing);
* ``"numpy"``          -- force the pure-numpy path.

Individual calls can override the default by passing ``backend="numpy"`` /
``backend="numba"`` to the public functions that take a ``backend``
keyword; the benchmark script uses this to time both paths in one process.

No kernel uses fastmath or threading, so results are deterministic and
identical across runs for a fixed backend.
"""

from __future__ import annotations

import os
import sys

_env_choice = os.environ.get("PRIMELAB_BACKEND", "auto").strip().lower() or "auto"
if _env_choice not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"PRIMELAB_BACKEND must be 'auto', 'numba' or 'numpy', got {_env_choice!r}"
    )

try:
    from numba import njit  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAS_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        """Stand-in decorator so kernel modules import without numba."""

        def wrap(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return wrap


if _env_choice == "numba" and not HAS_NUMBA:  # pragma: no cover
    print(
        "primelab: PRIMELAB_BACKEND=numba but numba is not importable; "
        "falling back to the pure-numpy backend",
        file=sys.stderr,
    )

if _env_choice == "numpy":
    DEFAULT_BACKEND = "numpy"
elif _env_choice == "numba":
    DEFAULT_BACKEND = "numba" if HAS_NUMBA else "numpy"
else:
    DEFAULT_BACKEND = "numba" if HAS_NUMBA else "numpy"


def resolve_backend(backend: str | None = None) -> str:
    """Return the backend to use for one call: explicit arg wins, else default."""
    if backend is None:
        return DEFAULT_BACKEND
    b = backend.strip().lower()
    if b not in ("numba", "numpy"):
        raise ValueError(f"backend must be 'numba' or 'numpy', got {backend!r}")
    if b == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return b
