"""Backend selection for the hot loops.

The compiled extension ``levynet._ckernels`` is used when it is importable;
otherwise the pure-Python module ``levynet._pykernels`` is used. Setting the
environment variable ``LEVYNET_BACKEND=python`` forces the fallback.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels
from .errors import ParameterError

__all__ = [
    "BACKEND",
    "get_backend",
    "minplus_closure",
    "height_process",
    "snake_retrace",
    "offspring_walk",
]


def _select() -> tuple[str, ModuleType]:
    if os.environ.get("LEVYNET_BACKEND", "").lower() == "python":
        return "python", _pykernels
    try:
        from . import _ckernels  # type: ignore[attr-defined]
    except ImportError:
        return "python", _pykernels
    return "cython", _ckernels


BACKEND, _impl = _select()


def get_backend(name: str | None = None) -> ModuleType:
    """Return a kernel module by name (``"cython"`` or ``"python"``)."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels  # type: ignore[attr-defined]

        return _ckernels
    raise ParameterError(f"unknown backend {name!r}")


minplus_closure = _impl.minplus_closure
height_process = _impl.height_process
snake_retrace = _impl.snake_retrace
offspring_walk = _impl.offspring_walk
