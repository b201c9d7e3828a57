"""Hot numeric kernels with two interchangeable backends.

The numba backend compiles explicit loops with ``@njit``; the numpy backend is
an independently written vectorized version of the same routines. The backend
is chosen once at import time:

    MULTISCALE_DISABLE_NUMBA=1   force the pure-numpy path

Both modules expose the same functions; ``numpy_backend`` and
``numba_backend()`` give direct access for cross-checking and benchmarks.
"""

import os

from . import _numpy as numpy_backend

_FLAG = os.environ.get("MULTISCALE_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG in ("1", "true", "yes", "on")

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def numba_backend():
    """Import and return the numba backend (compiles lazily on first call)."""
    if not HAVE_NUMBA:
        raise ImportError("numba is not installed")
    from . import _numba

    return _numba


if USE_NUMBA:
    from . import _numba as _impl
else:
    _impl = numpy_backend

BACKEND = "numba" if USE_NUMBA else "numpy"

saddle_primal = _impl.saddle_primal
saddle_dual = _impl.saddle_dual
closed_form = _impl.closed_form
sample_index = _impl.sample_index
play_expert_game = _impl.play_expert_game
lemma_sides = _impl.lemma_sides

__all__ = [
    "BACKEND",
    "HAVE_NUMBA",
    "USE_NUMBA",
    "closed_form",
    "lemma_sides",
    "numba_backend",
    "numpy_backend",
    "play_expert_game",
    "saddle_dual",
    "saddle_primal",
    "sample_index",
]
