"""Slice high-resolution images into fixed-size overlapping tiles.

Edge tiles are clamped to the image instead of padded, preserving pixel
fidelity; images smaller than the tile size yield a single unpadded tile.
Annotations are reassigned into tile-local coordinates, keeping a clipped
object only when its visible fraction reaches the configured threshold.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import kernels
from .errors import ConfigError
from .formats.dota import write_dota_annotation
from .geometry import HBox
from .records import DatasetIndex, ImageRecord, ObjectRecord

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TilingConfig:
    tile_size: int = 512
    overlap: int = 200
    visibility_threshold: float = 0.5
    keep_empty_tiles: bool = True

    def __post_init__(self) -> None:
        if self.tile_size < 1:
            raise ConfigError(f"tile_size must be >= 1, got {self.tile_size}")
        if not 0 <= self.overlap < self.tile_size:
            raise ConfigError(f"overlap must be in [0, tile_size), got {self.overlap}")
        if not 0 < self.visibility_threshold <= 1:
            raise ConfigError(
                f"visibility_threshold must be in (0, 1], got {self.visibility_threshold}"
            )

    @property
    def stride(self) -> int:
        return self.tile_size - self.overlap


@dataclass(frozen=True)
class TileSpec:
    """One window of a tiling plan."""

    parent_image_id: str
    origin_x: int
    origin_y: int
    tile_w: int
    tile_h: int
    row: int
    col: int

    @property
    def index(self) -> tuple[int, int]:
        return (self.row, self.col)

    @property
    def tile_id(self) -> str:
        return f"{self.parent_image_id}_r{self.row}_c{self.col}"

    def window(self) -> HBox:
        return HBox(
            float(self.origin_x),
            float(self.origin_y),
            float(self.origin_x + self.tile_w),
            float(self.origin_y + self.tile_h),
        )


def axis_positions(extent: int, tile_size: int, stride: int) -> list[int]:
    """Window start positions along one axis.

    Positions advance by the stride while a full tile still ends short of the
    extent; a final clamped position ensures full coverage. Extents at or
    below the tile size get the single position 0.
    """
    if extent <= tile_size:
        return [0]
    positions = []
    pos = 0
    while pos + tile_size < extent:
        positions.append(pos)
        pos += stride
    final = extent - tile_size
    if positions[-1] != final:
        positions.append(final)
    return positions


def plan_tiles(width: int, height: int, cfg: TilingConfig, image_id: str = "") -> list[TileSpec]:
    """All tile windows for an image, row-major."""
    if width < 1 or height < 1:
        raise ConfigError(f"image extents must be positive, got {width}x{height}")
    xs = axis_positions(width, cfg.tile_size, cfg.stride)
    ys = axis_positions(height, cfg.tile_size, cfg.stride)
    tile_w = min(cfg.tile_size, width)
    tile_h = min(cfg.tile_size, height)
    return [
        TileSpec(
            parent_image_id=image_id,
            origin_x=ox,
            origin_y=oy,
            tile_w=tile_w,
            tile_h=tile_h,
            row=row,
            col=col,
        )
        for row, oy in enumerate(ys)
        for col, ox in enumerate(xs)
    ]


def assign_objects(
    tile: TileSpec, objects: list[ObjectRecord] | tuple[ObjectRecord, ...], cfg: TilingConfig
) -> list[ObjectRecord]:
    """Clip parent-image objects into a tile and translate to tile-local coordinates.

    An object is kept only when its visible fraction inside the tile window
    is >= cfg.visibility_threshold. Kept geometry becomes the clipped hull's
    corner quad; class and difficult flags are preserved.
    """
    if not objects:
        return []
    boxes = np.array([obj.hbox.as_tuple() for obj in objects], dtype=np.float64)
    window = np.array(
        [tile.origin_x, tile.origin_y, tile.origin_x + tile.tile_w, tile.origin_y + tile.tile_h],
        dtype=np.float64,
    )
    clipped, fractions = kernels.clip_boxes(boxes, window)
    kept: list[ObjectRecord] = []
    for obj, rect, fraction in zip(objects, clipped, fractions):
        if fraction < cfg.visibility_threshold or fraction <= 0.0:
            continue
        local = HBox(
            rect[0] - tile.origin_x,
            rect[1] - tile.origin_y,
            rect[2] - tile.origin_x,
            rect[3] - tile.origin_y,
        )
        kept.append(ObjectRecord.from_hbox(local, obj.class_name, obj.difficult))
    return kept


@dataclass(frozen=True)
class TilingResult:
    index: DatasetIndex
    errors: tuple[str, ...] = ()


def _tile_one_image(
    img: ImageRecord, cfg: TilingConfig, images_dir: Path, annotations_dir: Path
) -> list[ImageRecord]:
    with Image.open(img.path) as source:
        source.load()
        tiles: list[ImageRecord] = []
        for spec in plan_tiles(img.width, img.height, cfg, img.image_id):
            objects = assign_objects(spec, img.objects, cfg)
            if not objects and not cfg.keep_empty_tiles:
                continue
            crop = source.crop(
                (spec.origin_x, spec.origin_y, spec.origin_x + spec.tile_w, spec.origin_y + spec.tile_h)
            )
            tile_path = images_dir / f"{spec.tile_id}.png"
            crop.save(tile_path, format="PNG")
            (annotations_dir / f"{spec.tile_id}.txt").write_text(
                write_dota_annotation(objects), encoding="utf-8"
            )
            tiles.append(
                ImageRecord(
                    image_id=spec.tile_id,
                    path=tile_path,
                    width=spec.tile_w,
                    height=spec.tile_h,
                    objects=tuple(objects),
                )
            )
    return tiles


def tile_dataset(
    ds: DatasetIndex, cfg: TilingConfig, out_root: Path | str, jobs: int | None = None
) -> TilingResult:
    """Tile every image of a dataset to out_root/{images,annotations}.

    Images tile independently in a worker pool; the returned index is sorted
    by (parent, row, col) regardless of completion order. Per-image decode
    failures are collected, not raised, so the rest of the dataset proceeds.
    """
    out_root = Path(out_root)
    images_dir = out_root / "images"
    annotations_dir = out_root / "annotations"
    images_dir.mkdir(parents=True, exist_ok=True)
    annotations_dir.mkdir(parents=True, exist_ok=True)

    ordered = sorted(ds.images, key=lambda im: im.image_id)
    errors: list[str] = []
    tiles: list[ImageRecord] = []

    def run(img: ImageRecord) -> tuple[list[ImageRecord], str | None]:
        try:
            return _tile_one_image(img, cfg, images_dir, annotations_dir), None
        except Exception as exc:
            return [], f"{img.image_id}: {exc}"

    workers = max(1, jobs if jobs is not None else (os.cpu_count() or 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for per_image, error in pool.map(run, ordered):
            if error is not None:
                log.warning("tile failure: %s", error)
                errors.append(error)
            tiles.extend(per_image)

    index = DatasetIndex.build(out_root, tiles, declared_classes=ds.class_names)
    return TilingResult(index=index, errors=tuple(errors))
