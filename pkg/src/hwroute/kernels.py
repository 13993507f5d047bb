"""Backend selection for the hot array kernels.

The compiled extension is used when it imports; otherwise the pure-Python
twins are loaded.  ``HWROUTE_KERNELS=python`` forces the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("HWROUTE_KERNELS", "").lower() != "python":
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "compiled"

apsp = _impl.apsp
collect_paths = _impl.collect_paths
greedy_hitting_set = _impl.greedy_hitting_set


def backends():
    """Return a dict of every importable backend module keyed by name."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels as compiled  # type: ignore[attr-defined]

        found["compiled"] = compiled
    except ImportError:
        pass
    return found
