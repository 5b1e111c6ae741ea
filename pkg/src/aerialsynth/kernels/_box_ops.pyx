# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled box kernels.

Semantics and arithmetic ordering mirror `_box_ops_py` exactly; the two
backends must stay bit-identical (enforced by the kernel parity tests).
"""

import numpy as np

BACKEND = "compiled"


cdef inline double _iou_single(double ax1, double ay1, double ax2, double ay2,
                               double bx1, double by1, double bx2, double by2) nogil:
    cdef double ix1 = ax1 if ax1 > bx1 else bx1
    cdef double iy1 = ay1 if ay1 > by1 else by1
    cdef double ix2 = ax2 if ax2 < bx2 else bx2
    cdef double iy2 = ay2 if ay2 < by2 else by2
    cdef double iw = ix2 - ix1
    cdef double ih = iy2 - iy1
    if iw < 0.0:
        iw = 0.0
    if ih < 0.0:
        ih = 0.0
    cdef double inter = iw * ih
    cdef double area_a = (ax2 - ax1) * (ay2 - ay1)
    cdef double area_b = (bx2 - bx1) * (by2 - by1)
    cdef double union_ = area_a + area_b - inter
    if union_ > 0.0:
        return inter / union_
    return 0.0


def iou_one_to_many(box, others):
    """IoU of one box against rows of `others`; both in (xmin, ymin, xmax, ymax)."""
    box_arr = np.ascontiguousarray(box, dtype=np.float64)
    others_arr = np.ascontiguousarray(others, dtype=np.float64).reshape(-1, 4)
    cdef double[::1] b = box_arr
    cdef double[:, ::1] o = others_arr
    cdef Py_ssize_t n = o.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            out[i] = _iou_single(b[0], b[1], b[2], b[3],
                                 o[i, 0], o[i, 1], o[i, 2], o[i, 3])
    return out_arr


def find_placement(xs, ys, double w, double h, occupied, double max_iou):
    """Scan candidate top-left positions for the first acceptable placement.

    Returns the first index whose box has IoU <= max_iou against every
    occupied box, or -1 when all candidates collide.
    """
    xs_arr = np.ascontiguousarray(xs, dtype=np.float64)
    ys_arr = np.ascontiguousarray(ys, dtype=np.float64)
    occ_arr = np.ascontiguousarray(occupied, dtype=np.float64).reshape(-1, 4)
    cdef double[::1] cxs = xs_arr
    cdef double[::1] cys = ys_arr
    cdef double[:, ::1] occ = occ_arr
    cdef Py_ssize_t attempts = cxs.shape[0]
    cdef Py_ssize_t n_occ = occ.shape[0]
    cdef Py_ssize_t i, j
    cdef double bx1, by1, bx2, by2
    cdef bint ok
    cdef Py_ssize_t found = -1
    with nogil:
        for i in range(attempts):
            bx1 = cxs[i]
            by1 = cys[i]
            bx2 = bx1 + w
            by2 = by1 + h
            ok = True
            for j in range(n_occ):
                if _iou_single(bx1, by1, bx2, by2,
                               occ[j, 0], occ[j, 1], occ[j, 2], occ[j, 3]) > max_iou:
                    ok = False
                    break
            if ok:
                found = i
                break
    return int(found)


def clip_boxes(boxes, window):
    """Clip box rows to a window; returns (clipped boxes, visible fractions)."""
    boxes_arr = np.ascontiguousarray(boxes, dtype=np.float64).reshape(-1, 4)
    window_arr = np.ascontiguousarray(window, dtype=np.float64)
    cdef double[:, ::1] bx = boxes_arr
    cdef double[::1] win = window_arr
    cdef Py_ssize_t n = bx.shape[0]
    clipped_arr = np.zeros((n, 4), dtype=np.float64)
    fractions_arr = np.zeros(n, dtype=np.float64)
    cdef double[:, ::1] clipped = clipped_arr
    cdef double[::1] fractions = fractions_arr
    cdef Py_ssize_t i
    cdef double ix1, iy1, ix2, iy2, inter, area
    with nogil:
        for i in range(n):
            ix1 = bx[i, 0] if bx[i, 0] > win[0] else win[0]
            iy1 = bx[i, 1] if bx[i, 1] > win[1] else win[1]
            ix2 = bx[i, 2] if bx[i, 2] < win[2] else win[2]
            iy2 = bx[i, 3] if bx[i, 3] < win[3] else win[3]
            if ix1 < ix2 and iy1 < iy2:
                inter = (ix2 - ix1) * (iy2 - iy1)
                area = (bx[i, 2] - bx[i, 0]) * (bx[i, 3] - bx[i, 1])
                fractions[i] = inter / area
                clipped[i, 0] = ix1
                clipped[i, 1] = iy1
                clipped[i, 2] = ix2
                clipped[i, 3] = iy2
    return clipped_arr, fractions_arr
