"""Box primitives in image pixel space.

Coordinates are floating point with the origin at the top-left corner of the
image, x growing right and y growing down. Values stay floats through the
whole pipeline even when sources are integral: rescaling during composition
produces fractional geometry, and rounding is deferred to serialization.

All types are immutable; operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GeometryError


@dataclass(frozen=True)
class HBox:
    """Axis-aligned box stored as corner extremes.

    Invariant: xmin < xmax and ymin < ymax (strictly positive area).
    """

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self) -> None:
        for v in (self.xmin, self.ymin, self.xmax, self.ymax):
            if not math.isfinite(v):
                raise GeometryError(f"non-finite box coordinate: {v!r}")
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise GeometryError(
                f"box must have positive extent, got "
                f"({self.xmin}, {self.ymin}, {self.xmax}, {self.ymax})"
            )

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def aspect(self) -> float:
        """Width over height of the box."""
        return self.width / self.height

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.xmin, self.ymin, self.xmax, self.ymax)

    def translate(self, dx: float, dy: float) -> "HBox":
        return HBox(self.xmin + dx, self.ymin + dy, self.xmax + dx, self.ymax + dy)

    def contains(self, other: "HBox") -> bool:
        return (
            self.xmin <= other.xmin
            and self.ymin <= other.ymin
            and other.xmax <= self.xmax
            and other.ymax <= self.ymax
        )


@dataclass(frozen=True)
class QuadBox:
    """Oriented box given as four vertices in annotation order.

    Invariants: every coordinate is finite and non-negative, and the four
    vertices are not all identical.
    """

    x1: float
    y1: float
    x2: float
    y2: float
    x3: float
    y3: float
    x4: float
    y4: float

    def __post_init__(self) -> None:
        coords = (self.x1, self.y1, self.x2, self.y2, self.x3, self.y3, self.x4, self.y4)
        for v in coords:
            if not math.isfinite(v):
                raise GeometryError(f"non-finite quad coordinate: {v!r}")
            if v < 0:
                raise GeometryError(f"negative quad coordinate: {v!r}")
        if len(set(self.vertices())) == 1:
            raise GeometryError("all four quad vertices are identical")

    def vertices(self) -> tuple[tuple[float, float], ...]:
        return (
            (self.x1, self.y1),
            (self.x2, self.y2),
            (self.x3, self.y3),
            (self.x4, self.y4),
        )

    @classmethod
    def from_hbox(cls, box: HBox) -> "QuadBox":
        """Corner quad of an axis-aligned box, clockwise from the top-left."""
        return cls(
            box.xmin, box.ymin,
            box.xmax, box.ymin,
            box.xmax, box.ymax,
            box.xmin, box.ymax,
        )


def quad_to_hbox(quad: QuadBox) -> HBox:
    """Axis-aligned hull of a quadrilateral.

    Raises GeometryError when the hull is degenerate (zero width or height).
    """
    xs = (quad.x1, quad.x2, quad.x3, quad.x4)
    ys = (quad.y1, quad.y2, quad.y3, quad.y4)
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    if xmin >= xmax or ymin >= ymax:
        raise GeometryError(f"degenerate quad hull: {quad.vertices()}")
    return HBox(xmin, ymin, xmax, ymax)


def iou(a: HBox, b: HBox) -> float:
    """Intersection over union of two boxes; 0.0 when disjoint."""
    ix1 = max(a.xmin, b.xmin)
    iy1 = max(a.ymin, b.ymin)
    ix2 = min(a.xmax, b.xmax)
    iy2 = min(a.ymax, b.ymax)
    iw = max(ix2 - ix1, 0.0)
    ih = max(iy2 - iy1, 0.0)
    inter = iw * ih
    union = a.area + b.area - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def clip_box(box: HBox, window: HBox) -> tuple[HBox, float] | None:
    """Clip a box to a window.

    Returns the intersection rectangle together with the visible fraction
    (intersection area over original area), or None when the intersection is
    empty or degenerate (zero width or height).
    """
    ix1 = max(box.xmin, window.xmin)
    iy1 = max(box.ymin, window.ymin)
    ix2 = min(box.xmax, window.xmax)
    iy2 = min(box.ymax, window.ymax)
    if ix1 >= ix2 or iy1 >= iy2:
        return None
    clipped = HBox(ix1, iy1, ix2, iy2)
    return clipped, clipped.area / box.area
