"""Backend selection for the stencil/stepping kernels.

Two interchangeable implementations exist: a numba-compiled one (default)
and a pure-NumPy one. Selection is by the environment variable
``CROSSDIFF_BACKEND`` (``"numba"`` or ``"numpy"``), read once at import.
If numba is unavailable the NumPy path is used silently. Both backends
produce bit-identical explicit trajectories; ``benchmarks/`` compares their
speed.
"""

from __future__ import annotations

import os
import warnings

from ..errors import ConfigError

ENV_VAR = "CROSSDIFF_BACKEND"

from . import numpy_backend  # noqa: E402

try:
    from . import numba_backend
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_backend = None


def _select():
    choice = os.environ.get(ENV_VAR, "numba").strip().lower()
    if choice not in ("numba", "numpy"):
        raise ConfigError(f"must be 'numba' or 'numpy', got {choice!r}", path=ENV_VAR)
    if choice == "numba":
        if numba_backend is not None:
            return numba_backend
        warnings.warn("numba unavailable, falling back to the NumPy kernel backend")
        return numpy_backend
    return numpy_backend


active = _select()


def get_backend(name: str | None = None):
    """Return a kernel backend module; the active one when ``name`` is None."""
    if name is None:
        return active
    if name == "numpy":
        return numpy_backend
    if name == "numba":
        if numba_backend is None:
            raise ConfigError("numba backend requested but numba is not importable",
                              path=ENV_VAR)
        return numba_backend
    raise ConfigError(f"unknown backend {name!r}", path=ENV_VAR)
