"""Marking-kernel selection: compiled extension when available.

Set ``SEGMAP_PURE_PY=1`` to force the numpy fallback.  Both kernels are
bit-identical by contract, so the choice only affects speed.
"""

from __future__ import annotations

import os

if os.environ.get("SEGMAP_PURE_PY"):
    from .kernel_py import KERNEL_NAME, mark_phase
else:
    try:
        from ._kernel import KERNEL_NAME, mark_phase
    except ImportError:                                   # pragma: no cover
        from .kernel_py import KERNEL_NAME, mark_phase

__all__ = ["KERNEL_NAME", "mark_phase"]
