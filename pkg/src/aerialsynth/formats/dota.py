"""Reading and writing DOTA-format annotations and dataset discovery.

On-disk format: UTF-8 text, one object per line,
``x1 y1 x2 y2 x3 y3 x4 y4 class difficult``. Header lines beginning with
``imagesource`` or ``gsd`` and blank lines are tolerated on read but never
written back: the pipeline only consumes object geometry.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Sequence

from PIL import Image

from ..errors import AnnotationParseError, DatasetError, GeometryError
from ..geometry import QuadBox
from ..records import DatasetIndex, ImageRecord, ObjectRecord, clamp_object_to_image

log = logging.getLogger(__name__)

_HEADER_PREFIXES = ("imagesource", "gsd")
IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")
ANNOTATION_SUFFIX = ".txt"


def parse_dota_annotation(text: str, image_id: str = "") -> list[ObjectRecord]:
    """Parse one annotation file's content into object records, in file order.

    Negative coordinates are clamped to 0 on load (DOTA boxes commonly
    overshoot borders); clamping against the image extent happens later, at
    indexing time, when dimensions are known.
    """
    records: list[ObjectRecord] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(_HEADER_PREFIXES):
            continue
        tokens = line.split()
        if len(tokens) != 10:
            raise AnnotationParseError(
                f"expected 10 tokens, got {len(tokens)}", line_number, image_id
            )
        try:
            coords = [max(0.0, float(t)) for t in tokens[:8]]
        except ValueError:
            raise AnnotationParseError(
                f"unparseable coordinate in {tokens[:8]!r}", line_number, image_id
            ) from None
        class_name = tokens[8]
        if not class_name:
            raise AnnotationParseError("empty class name", line_number, image_id)
        if tokens[9] not in ("0", "1"):
            raise AnnotationParseError(
                f"difficult flag must be 0 or 1, got {tokens[9]!r}", line_number, image_id
            )
        try:
            quad = QuadBox(*coords)
            records.append(ObjectRecord.from_quad(quad, class_name, difficult=tokens[9] == "1"))
        except GeometryError as exc:
            raise AnnotationParseError(str(exc), line_number, image_id) from exc
    return records


def format_coordinate(value: float) -> str:
    """Integral values print as integers, fractional ones without trailing zeros."""
    if value == int(value):
        return str(int(value))
    return repr(value)


def write_dota_annotation(records: Sequence[ObjectRecord]) -> str:
    """Serialize records, one line each, newline-terminated; order preserved."""
    lines = []
    for rec in records:
        q = rec.geometry
        coords = " ".join(
            format_coordinate(v)
            for v in (q.x1, q.y1, q.x2, q.y2, q.x3, q.y3, q.x4, q.y4)
        )
        lines.append(f"{coords} {rec.class_name} {1 if rec.difficult else 0}\n")
    return "".join(lines)


def probe_image_size(path: Path) -> tuple[int, int]:
    """(width, height) from the image header, without decoding pixel data."""
    try:
        with Image.open(path) as im:
            return int(im.width), int(im.height)
    except Exception as exc:
        raise DatasetError(f"unreadable image header: {path}: {exc}") from exc


def read_class_list(path: Path) -> list[str]:
    """One class name per line; blank lines and #-comments skipped."""
    names = []
    for line in path.read_text(encoding="utf-8").splitlines():
        name = line.strip()
        if name and not name.startswith("#"):
            names.append(name)
    return names


def discover_dataset(
    root: Path | str,
    images_dir: str = "images",
    annotations_dir: str = "annotations",
    declared_classes: Iterable[str] = (),
) -> DatasetIndex:
    """Index a dataset directory, pairing images with same-stem annotations.

    Images with no annotation file are indexed with zero objects (negative
    images). Objects partly outside the image are clamped to bounds; objects
    entirely outside are dropped with a warning.
    """
    root = Path(root)
    img_dir = root / images_dir
    ann_dir = root / annotations_dir
    if not img_dir.is_dir():
        raise DatasetError(f"images directory not found: {img_dir}")

    image_paths = sorted(
        (p for p in img_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES),
        key=lambda p: p.stem,
    )
    stems: dict[str, Path] = {}
    for path in image_paths:
        if path.stem in stems:
            raise DatasetError(
                f"duplicate image stem {path.stem!r}: {stems[path.stem].name} and {path.name}"
            )
        stems[path.stem] = path

    images: list[ImageRecord] = []
    for stem, path in stems.items():
        width, height = probe_image_size(path)
        ann_path = ann_dir / f"{stem}{ANNOTATION_SUFFIX}"
        objects: list[ObjectRecord] = []
        if ann_path.is_file():
            parsed = parse_dota_annotation(ann_path.read_text(encoding="utf-8"), stem)
            for obj in parsed:
                clamped = clamp_object_to_image(obj, width, height)
                if clamped is None:
                    log.warning("%s: dropping object entirely outside image bounds", stem)
                else:
                    objects.append(clamped)
        images.append(
            ImageRecord(image_id=stem, path=path, width=width, height=height, objects=tuple(objects))
        )
    return DatasetIndex.build(root, images, declared_classes)


def write_dataset(index: DatasetIndex, out_root: Path) -> None:
    """Write every image's annotation file under out_root/annotations."""
    ann_dir = out_root / "annotations"
    ann_dir.mkdir(parents=True, exist_ok=True)
    for img in index.images:
        (ann_dir / f"{img.image_id}{ANNOTATION_SUFFIX}").write_text(
            write_dota_annotation(img.objects), encoding="utf-8"
        )
