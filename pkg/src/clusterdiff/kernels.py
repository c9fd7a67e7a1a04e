"""Kernel backend selection: compiled extension if available, numpy fallback otherwise."""

from __future__ import annotations

from . import _kernels_py

try:
    from . import _kernels  # type: ignore[attr-defined]

    BACKEND = "cython"
    reservoir_update = _kernels.reservoir_update
except ImportError:  # extension not built on this install
    _kernels = None
    BACKEND = "python"
    reservoir_update = _kernels_py.reservoir_update


def available_backends() -> dict:
    """Kernel implementations present in this install, keyed by name."""
    backends = {"python": _kernels_py.reservoir_update}
    if _kernels is not None:
        backends["cython"] = _kernels.reservoir_update
    return backends
