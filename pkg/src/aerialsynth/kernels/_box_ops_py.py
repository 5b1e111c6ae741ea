"""Pure-Python (numpy) implementation of the box kernels.

This is the fallback selected when the compiled extension is unavailable.
Arithmetic is written with the same operation ordering as the compiled
version so both backends produce bit-identical doubles.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def iou_one_to_many(box: np.ndarray, others: np.ndarray) -> np.ndarray:
    """IoU of one box against rows of `others`; both in (xmin, ymin, xmax, ymax)."""
    box = np.asarray(box, dtype=np.float64)
    others = np.asarray(others, dtype=np.float64).reshape(-1, 4)
    ix1 = np.maximum(box[0], others[:, 0])
    iy1 = np.maximum(box[1], others[:, 1])
    ix2 = np.minimum(box[2], others[:, 2])
    iy2 = np.minimum(box[3], others[:, 3])
    iw = np.maximum(ix2 - ix1, 0.0)
    ih = np.maximum(iy2 - iy1, 0.0)
    inter = iw * ih
    area_box = (box[2] - box[0]) * (box[3] - box[1])
    area_others = (others[:, 2] - others[:, 0]) * (others[:, 3] - others[:, 1])
    union = area_box + area_others - inter
    safe = union > 0.0
    return np.where(safe, inter / np.where(safe, union, 1.0), 0.0)


def find_placement(
    xs: np.ndarray,
    ys: np.ndarray,
    w: float,
    h: float,
    occupied: np.ndarray,
    max_iou: float,
) -> int:
    """Scan candidate top-left positions for the first acceptable placement.

    A candidate (xs[i], ys[i], xs[i]+w, ys[i]+h) is acceptable when its IoU
    against every occupied box is <= max_iou. Returns the first acceptable
    index, or -1 when all candidates collide.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    occupied = np.asarray(occupied, dtype=np.float64).reshape(-1, 4)
    for i in range(xs.shape[0]):
        box = np.array([xs[i], ys[i], xs[i] + w, ys[i] + h], dtype=np.float64)
        if occupied.shape[0] == 0:
            return i
        if not np.any(iou_one_to_many(box, occupied) > max_iou):
            return i
    return -1


def clip_boxes(boxes: np.ndarray, window: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Clip box rows to a window; returns (clipped boxes, visible fractions).

    Rows whose intersection is empty or degenerate get fraction 0.0 and an
    all-zero clipped row.
    """
    boxes = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
    window = np.asarray(window, dtype=np.float64)
    ix1 = np.maximum(boxes[:, 0], window[0])
    iy1 = np.maximum(boxes[:, 1], window[1])
    ix2 = np.minimum(boxes[:, 2], window[2])
    iy2 = np.minimum(boxes[:, 3], window[3])
    valid = (ix1 < ix2) & (iy1 < iy2)
    inter = (ix2 - ix1) * (iy2 - iy1)
    area = (boxes[:, 2] - boxes[:, 0]) * (boxes[:, 3] - boxes[:, 1])
    fractions = np.where(valid, inter / area, 0.0)
    clipped = np.where(valid[:, None], np.stack([ix1, iy1, ix2, iy2], axis=1), 0.0)
    return clipped, fractions
