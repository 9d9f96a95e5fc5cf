"""Hot-kernel backend selection.

The compiled extension is preferred when it imported cleanly; the numpy
reference produces the same results (to floating-point noise) and is used
as a fallback or when ``RISLOC_BACKEND=python`` is set. Set
``RISLOC_BACKEND=compiled`` to fail loudly instead of falling back.
"""

from __future__ import annotations

import os

from . import _reference

_requested = os.environ.get("RISLOC_BACKEND", "auto").lower()

if _requested == "python":
    _impl = _reference
elif _requested in ("auto", "compiled"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "RISLOC_BACKEND=compiled but the risloc.kernels._core extension "
                "is not built; reinstall the package or use RISLOC_BACKEND=python"
            )
        _impl = _reference
else:
    raise ValueError(f"unknown RISLOC_BACKEND {_requested!r}")

model_terms = _impl.model_terms
BACKEND_NAME: str = _impl.BACKEND_NAME


def backend_name() -> str:
    """Name of the kernel backend selected at import time."""
    return BACKEND_NAME


def available_backends() -> dict[str, object]:
    """Importable backend modules keyed by name, for tests and benchmarks."""
    out: dict[str, object] = {"python": _reference}
    try:
        from . import _core

        out["compiled"] = _core
    except ImportError:
        pass
    return out
