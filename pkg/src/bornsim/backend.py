"""Kernel backend selection: compiled extension if available, else Python.

Set BORNSIM_BACKEND=python to force the fallback (useful for benchmarks
and for testing stream equivalence), or BORNSIM_BACKEND=compiled to fail
loudly when the extension is missing.  The choice never changes results,
only speed; both backends produce bit-identical trajectories.
"""

from __future__ import annotations

import os

_requested = os.environ.get("BORNSIM_BACKEND", "auto").strip().lower() or "auto"

if _requested == "python":
    from . import _pykernels as kernels
elif _requested == "compiled":
    from . import _kernels as kernels  # ImportError here means the build failed
elif _requested == "auto":
    try:
        from . import _kernels as kernels
    except ImportError:
        from . import _pykernels as kernels
else:
    raise RuntimeError(f"BORNSIM_BACKEND={_requested!r}; use auto, compiled, or python")

BACKEND = kernels.BACKEND_NAME


def using_compiled() -> bool:
    return BACKEND == "compiled"
