"""Annotation data model: objects, images, and the dataset index.

Everything here is an immutable value after construction and safe to share
between concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DatasetError, GeometryError
from .geometry import HBox, QuadBox, quad_to_hbox


@dataclass(frozen=True)
class ObjectRecord:
    """One ground-truth instance: oriented geometry plus its axis-aligned hull."""

    geometry: QuadBox
    hbox: HBox
    class_name: str
    difficult: bool = False

    def __post_init__(self) -> None:
        if not self.class_name:
            raise GeometryError("object class_name must be non-empty")
        if quad_to_hbox(self.geometry) != self.hbox:
            raise GeometryError("hbox must equal the axis-aligned hull of geometry")

    @classmethod
    def from_quad(cls, quad: QuadBox, class_name: str, difficult: bool = False) -> "ObjectRecord":
        return cls(geometry=quad, hbox=quad_to_hbox(quad), class_name=class_name, difficult=difficult)

    @classmethod
    def from_hbox(cls, hbox: HBox, class_name: str, difficult: bool = False) -> "ObjectRecord":
        return cls(geometry=QuadBox.from_hbox(hbox), hbox=hbox, class_name=class_name, difficult=difficult)


def clamp_object_to_image(obj: ObjectRecord, width: int, height: int) -> ObjectRecord | None:
    """Clamp an object's quad into [0, width] x [0, height].

    DOTA annotations commonly exceed image borders by a pixel, so boxes are
    clamped rather than rejected. Returns None when clamping collapses the
    hull to zero area (object entirely outside the image).
    """
    q = obj.geometry
    xs = [min(max(v, 0.0), float(width)) for v in (q.x1, q.x2, q.x3, q.x4)]
    ys = [min(max(v, 0.0), float(height)) for v in (q.y1, q.y2, q.y3, q.y4)]
    try:
        clamped = QuadBox(xs[0], ys[0], xs[1], ys[1], xs[2], ys[2], xs[3], ys[3])
        return ObjectRecord.from_quad(clamped, obj.class_name, obj.difficult)
    except GeometryError:
        return None


@dataclass(frozen=True)
class ImageRecord:
    """An image with its annotations.

    Invariant: every object hbox lies within [0, width] x [0, height].
    """

    image_id: str
    path: Path
    width: int
    height: int
    objects: tuple[ObjectRecord, ...] = ()

    def __post_init__(self) -> None:
        if not self.image_id:
            raise DatasetError("image_id must be non-empty")
        if self.width < 1 or self.height < 1:
            raise DatasetError(f"{self.image_id}: image extents must be positive")
        object.__setattr__(self, "objects", tuple(self.objects))
        bounds = HBox(0.0, 0.0, float(self.width), float(self.height))
        for obj in self.objects:
            if not bounds.contains(obj.hbox):
                raise GeometryError(
                    f"{self.image_id}: object box {obj.hbox.as_tuple()} outside "
                    f"image bounds {self.width}x{self.height}"
                )

    @property
    def is_negative(self) -> bool:
        """True for images with no annotated objects (paste backgrounds)."""
        return not self.objects


@dataclass(frozen=True)
class DatasetIndex:
    """A discovered dataset: images plus the ordered class universe.

    class_names is exactly the union of classes appearing in objects plus any
    declared classes; image ids are unique.
    """

    root: Path
    images: tuple[ImageRecord, ...]
    class_names: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "images", tuple(self.images))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        seen_ids: set[str] = set()
        for img in self.images:
            if img.image_id in seen_ids:
                raise DatasetError(f"duplicate image_id in index: {img.image_id!r}")
            seen_ids.add(img.image_id)
        declared = set(self.class_names)
        if len(declared) != len(self.class_names):
            raise DatasetError("class_names contains duplicates")
        observed = {obj.class_name for img in self.images for obj in img.objects}
        missing = observed - declared
        if missing:
            raise DatasetError(f"classes present in objects but not declared: {sorted(missing)}")

    @classmethod
    def build(
        cls,
        root: Path | str,
        images: Sequence[ImageRecord],
        declared_classes: Iterable[str] = (),
    ) -> "DatasetIndex":
        """Build an index whose class universe is the declared classes (in
        order) followed by any further classes in first-seen order."""
        names: list[str] = []
        seen: set[str] = set()
        for name in declared_classes:
            if name not in seen:
                names.append(name)
                seen.add(name)
        for img in images:
            for obj in img.objects:
                if obj.class_name not in seen:
                    names.append(obj.class_name)
                    seen.add(obj.class_name)
        return cls(root=Path(root), images=tuple(images), class_names=tuple(names))

    @property
    def total_objects(self) -> int:
        return sum(len(img.objects) for img in self.images)

    def negatives(self) -> tuple[ImageRecord, ...]:
        return tuple(img for img in self.images if img.is_negative)
