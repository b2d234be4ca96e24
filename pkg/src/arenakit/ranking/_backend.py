"""Kernel backend selection.

The env var ``ARENAKIT_BACKEND`` picks the implementation of the hot
per-record-per-bucket kernels:

    auto   - numba if importable, else numpy (default)
    numba  - require the jitted kernels
    numpy  - force the pure-numpy path

Both backends expose the same three functions and agree to ~1e-12; see
``benchmarks/bench_kernels.py`` for a speed comparison.
"""

from __future__ import annotations

import os

from . import _kernels_numpy

_ENV_VAR = "ARENAKIT_BACKEND"
_backend = None
_backend_name = None


def _select():
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR}={choice!r}: expected auto, numba or numpy")
    if choice == "numpy":
        return _kernels_numpy, "numpy"
    try:
        from . import _kernels_numba
    except ImportError:
        if choice == "numba":
            raise
        return _kernels_numpy, "numpy"
    return _kernels_numba, "numba"


def get_backend():
    global _backend, _backend_name
    if _backend is None:
        _backend, _backend_name = _select()
    return _backend


def backend_name() -> str:
    get_backend()
    return _backend_name
