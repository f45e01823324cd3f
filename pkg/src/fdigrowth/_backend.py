"""Backend selection: numba-compiled scalar kernels or vectorised numpy.

The active backend is chosen once at import from the FDIGROWTH_BACKEND
environment variable ("numba", "numpy", or "auto"), defaulting to numba
when it is importable.  `set_backend` switches at runtime, which the
benchmark and the cross-backend tests rely on.
"""

import os

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

_ENV = "FDIGROWTH_BACKEND"


def _initial() -> str:
    req = os.environ.get(_ENV, "").strip().lower()
    if req == "numpy":
        return "numpy"
    if req == "numba":
        if _numba is None:
            raise ImportError(f"{_ENV}=numba requested but numba is not importable")
        return "numba"
    if req not in ("", "auto"):
        raise ValueError(f"{_ENV} must be 'numba', 'numpy' or 'auto', got {req!r}")
    return "numba" if _numba is not None else "numpy"


_active = _initial()


def active_backend() -> str:
    return _active


def using_numba() -> bool:
    return _active == "numba"


def set_backend(name: str) -> None:
    global _active
    if name not in ("numba", "numpy"):
        raise ValueError("backend must be 'numba' or 'numpy'")
    if name == "numba" and _numba is None:
        raise ValueError("numba backend requested but numba is not importable")
    _active = name


def maybe_njit(fn):
    """numba.njit(cache=True) when numba is present, identity otherwise.

    Compilation is lazy (first call), so decorating costs nothing when the
    numpy backend is active.
    """
    if _numba is not None:
        return _numba.njit(cache=True)(fn)
    return fn
