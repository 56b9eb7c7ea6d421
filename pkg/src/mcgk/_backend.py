"""Kernel backend selection.

The compiled extension is used when it imports; ``MCGK_PURE_PYTHON=1`` forces
the pure-Python kernels.
"""
import os

from . import _kernels_py

BACKENDS = {"python": _kernels_py}

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None
else:
    BACKENDS["compiled"] = _compiled

if _compiled is not None and os.environ.get("MCGK_PURE_PYTHON", "") not in ("1", "true", "yes"):
    BACKEND = "compiled"
else:
    BACKEND = "python"

kernels = BACKENDS[BACKEND]
