"""Box-geometry kernels: compiled core with a pure-Python fallback.

The compiled extension is selected at import time when it has been built;
otherwise the numpy fallback is used. Set AERIALSYNTH_PURE_PYTHON=1 to force
the fallback (used by the benchmark and parity tests). Both backends are
bit-identical; `BACKEND` names the one in use.
"""

from __future__ import annotations

import os

from . import _box_ops_py

if os.environ.get("AERIALSYNTH_PURE_PYTHON") == "1":
    _impl = _box_ops_py
else:
    try:
        from . import _box_ops as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _box_ops_py

BACKEND: str = _impl.BACKEND

iou_one_to_many = _impl.iou_one_to_many
find_placement = _impl.find_placement
clip_boxes = _impl.clip_boxes

__all__ = ["BACKEND", "iou_one_to_many", "find_placement", "clip_boxes"]
