"""Kernel backends and problem packing.

Two interchangeable backends expose ``integrate`` and ``oracle_descent``
over packed array data: a numba-jitted one and a pure-numpy one. The
``PENFLOW_BACKEND`` environment variable picks between them; unset (or
``auto``), numba is preferred when importable.
"""

from __future__ import annotations

import os

from ..errors import ConfigError
from .pack import PackedProblem, pack_problem

__all__ = ["PackedProblem", "pack_problem", "get_backend", "available_backends"]


def available_backends():
    names = ["numpy"]
    try:
        import numba  # noqa: F401
        names.insert(0, "numba")
    except ImportError:
        pass
    return names


def get_backend(name=None):
    """Resolve a kernel backend module.

    Returns (module, resolved_name). ``name=None`` consults the
    PENFLOW_BACKEND environment variable.
    """
    if name is None:
        name = os.environ.get("PENFLOW_BACKEND", "")
    name = name.strip().lower()
    if name in ("", "auto"):
        try:
            from . import numba_backend
            return numba_backend, "numba"
        except ImportError:
            from . import numpy_backend
            return numpy_backend, "numpy"
    if name == "numpy":
        from . import numpy_backend
        return numpy_backend, "numpy"
    if name == "numba":
        try:
            from . import numba_backend
        except ImportError as exc:
            raise ConfigError(
                "backend 'numba' was requested but numba is not importable"
            ) from exc
        return numba_backend, "numba"
    raise ConfigError(f"unknown backend {name!r}: expected 'numba' or 'numpy'")
