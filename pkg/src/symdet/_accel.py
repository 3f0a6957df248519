"""Backend selection for the approximate-regime kernels.

``SYMDET_NUMBA=0`` (or ``off``/``false``/``no``) forces the pure-numpy path.
Numba is used otherwise, when importable.
"""
from __future__ import annotations

import contextlib
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None

_OFF = {"0", "off", "false", "no"}


def _env_backend() -> str:
    flag = os.environ.get("SYMDET_NUMBA", "1").strip().lower()
    return "numba" if HAVE_NUMBA and flag not in _OFF else "numpy"


_backend = _env_backend()


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


@contextlib.contextmanager
def use_backend(name: str):
    prev = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged."""
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)
