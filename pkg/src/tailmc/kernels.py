"""Backend selection for the hot path-extraction kernel.

The compiled Cython extension is preferred when importable; the pure
numpy twin is the fallback.  Set ``TAILMC_FORCE_PYTHON=1`` to force the
fallback (used by tests and the benchmark).  Both backends produce
identical paths and winners on tie-free inputs.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("TAILMC_FORCE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

scatter_max_path = _impl.scatter_max_path

__all__ = ["scatter_max_path", "BACKEND", "backends"]


def backends() -> dict:
    """All importable backends keyed by name (for tests and benchmarks)."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
