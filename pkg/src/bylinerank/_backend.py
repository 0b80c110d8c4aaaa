"""Kernel selection.

The compiled extension is used when it was built; otherwise, or when
``BYLINERANK_PURE`` is set to a non-empty value, the numpy twins are used.
"""

from __future__ import annotations

import os

from . import _pykernels

kernels = _pykernels
BACKEND = "python"

if not os.environ.get("BYLINERANK_PURE"):
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        pass

__all__ = ["kernels", "BACKEND"]
