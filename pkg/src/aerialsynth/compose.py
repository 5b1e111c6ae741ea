"""Copy-Paste composition of pool instances onto real backgrounds.

Pasting is a hard overwrite of the target rectangle, no blending or mask:
the emitted annotation equals the paste rectangle exactly, which is the whole
point of composing rather than synthesizing full scenes. Target geometry is
drawn from the class's empirical (area, aspect) pairs with bounded
multiplicative jitter and clamped back into the recorded ranges, so composed
instances never leave the class's observed size distribution.

Placement is rejection sampling: up to max_placement_attempts uniform draws
of the top-left corner, accepting the first whose IoU against every occupied
box (existing ground truth plus prior pastes) stays at or below the collision
threshold. The candidate scan is the pipeline's hot loop and runs through the
compiled kernel when available.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import kernels
from .errors import CompositionError, ConfigError
from .formats.dota import write_dota_annotation
from .geometry import HBox
from .pool import PoolEntry, PoolIndex
from .records import DatasetIndex, ImageRecord, ObjectRecord
from .seeding import make_rng
from .stats import ClassStats

log = logging.getLogger(__name__)

BACKGROUND_NEGATIVES = "negatives_only"
BACKGROUND_ALL = "all_tiles"
_BACKGROUND_SOURCES = (BACKGROUND_NEGATIVES, BACKGROUND_ALL)

AUDIT_LOG_NAME = "composition_log.jsonl"


@dataclass(frozen=True)
class CompositionConfig:
    instances_per_image: tuple[int, int] = (1, 5)
    max_placement_attempts: int = 50
    collision_iou_max: float = 0.05
    class_filter: frozenset[str] | None = None
    geometry_jitter: float = 0.10
    background_source: str = BACKGROUND_NEGATIVES
    seed: int = 0

    def __post_init__(self) -> None:
        lo, hi = self.instances_per_image
        if not (1 <= lo <= hi):
            raise ConfigError(f"instances_per_image must satisfy 1 <= min <= max, got {lo}..{hi}")
        if self.max_placement_attempts < 1:
            raise ConfigError("max_placement_attempts must be >= 1")
        if not 0.0 <= self.collision_iou_max < 1.0:
            raise ConfigError(f"collision_iou_max must be in [0, 1), got {self.collision_iou_max}")
        if not 0.0 <= self.geometry_jitter < 1.0:
            raise ConfigError(f"geometry_jitter must be in [0, 1), got {self.geometry_jitter}")
        if self.background_source not in _BACKGROUND_SOURCES:
            raise ConfigError(
                f"background_source must be one of {_BACKGROUND_SOURCES}, got {self.background_source!r}"
            )
        if self.class_filter is not None:
            object.__setattr__(self, "class_filter", frozenset(self.class_filter))


@dataclass(frozen=True)
class Placement:
    entry: PoolEntry
    target: HBox


@dataclass(frozen=True)
class PastePlan:
    background_image_id: str
    requested: int
    placements: tuple[Placement, ...]
    failed: int


def _quantize_dims(
    w0: float,
    h0: float,
    target_area: float,
    target_aspect: float,
    area_range: tuple[float, float],
    aspect_range: tuple[float, float],
) -> tuple[int, int]:
    """Round fractional target dims to whole pixels, preferring candidates
    whose realized (area, aspect) stay inside the class ranges."""
    ws = sorted({max(1, math.floor(w0)), max(1, math.ceil(w0))})
    hs = sorted({max(1, math.floor(h0)), max(1, math.ceil(h0))})
    best: tuple[int, int] | None = None
    best_key: tuple[int, float] | None = None
    for w in ws:
        for h in hs:
            area = float(w * h)
            aspect = w / h
            contained = (
                area_range[0] <= area <= area_range[1]
                and aspect_range[0] <= aspect <= aspect_range[1]
            )
            distance = abs(math.log(area / target_area)) + abs(math.log(aspect / target_aspect))
            key = (0 if contained else 1, distance)
            if best_key is None or key < best_key:
                best_key = key
                best = (w, h)
    assert best is not None
    return best


def sample_target_geometry(
    stats: ClassStats, cfg: CompositionConfig, rng: np.random.Generator
) -> tuple[int, int]:
    """Draw a paste size for one instance of a class.

    One empirical (area, aspect) pair is drawn uniformly from the class's
    recorded instances, independently jittered by up to +/-geometry_jitter,
    clamped into the class's recorded ranges, then converted to pixels via
    w = sqrt(area * aspect), h = sqrt(area / aspect).
    """
    if stats.instance_count == 0:
        raise CompositionError(f"no recorded geometry for class {stats.class_name!r}")
    pair_index = int(rng.integers(0, stats.instance_count))
    area, aspect = stats.pairs[pair_index]
    jitter = cfg.geometry_jitter
    area *= float(rng.uniform(1.0 - jitter, 1.0 + jitter))
    aspect *= float(rng.uniform(1.0 - jitter, 1.0 + jitter))
    assert stats.area_range is not None and stats.aspect_range is not None
    area = min(max(area, stats.area_range[0]), stats.area_range[1])
    aspect = min(max(aspect, stats.aspect_range[0]), stats.aspect_range[1])
    w0 = math.sqrt(area * aspect)
    h0 = math.sqrt(area / aspect)
    return _quantize_dims(w0, h0, area, aspect, stats.area_range, stats.aspect_range)


def place_instance(
    bg_w: int,
    bg_h: int,
    occupied: list[HBox],
    w: int,
    h: int,
    cfg: CompositionConfig,
    rng: np.random.Generator,
) -> HBox | None:
    """Find a collision-free top-left for a w x h paste, or None.

    Draws all max_placement_attempts candidates up front (fixed RNG
    consumption, so outcomes never depend on which attempt wins or on the
    kernel backend) and takes the first acceptable one.
    """
    if w > bg_w or h > bg_h:
        return None
    attempts = cfg.max_placement_attempts
    xs = rng.integers(0, bg_w - w + 1, size=attempts).astype(np.float64)
    ys = rng.integers(0, bg_h - h + 1, size=attempts).astype(np.float64)
    occ = np.array([b.as_tuple() for b in occupied], dtype=np.float64).reshape(-1, 4)
    index = kernels.find_placement(xs, ys, float(w), float(h), occ, cfg.collision_iou_max)
    if index < 0:
        return None
    x = float(xs[index])
    y = float(ys[index])
    return HBox(x, y, x + w, y + h)


def rescale_instance(crop: Image.Image, target_w: int, target_h: int) -> Image.Image:
    """Area-average when shrinking on both axes, bilinear otherwise."""
    if target_w <= crop.width and target_h <= crop.height:
        resample = Image.Resampling.BOX
    else:
        resample = Image.Resampling.BILINEAR
    return crop.resize((target_w, target_h), resample)


def eligible_classes(
    pool: PoolIndex, stats: dict[str, ClassStats], cfg: CompositionConfig
) -> list[str]:
    names = set(pool.classes()) & {n for n, s in stats.items() if s.instance_count > 0}
    if cfg.class_filter is not None:
        names &= cfg.class_filter
    return sorted(names)


def compose_image(
    background: ImageRecord,
    pool: PoolIndex,
    stats: dict[str, ClassStats],
    cfg: CompositionConfig,
    rng: np.random.Generator,
) -> tuple[Image.Image, list[ObjectRecord], PastePlan]:
    """Paste a random number of pool instances onto one background.

    Returns the composed pixels, the full annotation list (background ground
    truth preserved, pasted objects appended with difficult=0), and the paste
    plan. Placements that find no collision-free spot are skipped and counted.
    """
    classes = eligible_classes(pool, stats, cfg)
    if not classes:
        raise CompositionError("no eligible class: pool, stats, and filter share no class")
    lo, hi = cfg.instances_per_image
    requested = int(rng.integers(lo, hi + 1))

    with Image.open(background.path) as src:
        canvas = src.convert("RGB")

    records: list[ObjectRecord] = list(background.objects)
    occupied: list[HBox] = [obj.hbox for obj in background.objects]
    placements: list[Placement] = []
    failed = 0
    for _ in range(requested):
        class_name = classes[int(rng.integers(0, len(classes)))]
        entries = pool.entries_for(class_name)
        entry = entries[int(rng.integers(0, len(entries)))]
        target_w, target_h = sample_target_geometry(stats[class_name], cfg, rng)
        rect = place_instance(canvas.width, canvas.height, occupied, target_w, target_h, cfg, rng)
        if rect is None:
            failed += 1
            continue
        with Image.open(entry.path) as crop_src:
            crop = crop_src.convert("RGB")
        canvas.paste(rescale_instance(crop, target_w, target_h), (int(rect.xmin), int(rect.ymin)))
        records.append(ObjectRecord.from_hbox(rect, class_name, difficult=False))
        occupied.append(rect)
        placements.append(Placement(entry=entry, target=rect))

    plan = PastePlan(
        background_image_id=background.image_id,
        requested=requested,
        placements=tuple(placements),
        failed=failed,
    )
    return canvas, records, plan


def _audit_line(image_id: str, plan: PastePlan) -> str:
    return json.dumps(
        {
            "image_id": image_id,
            "background": plan.background_image_id,
            "requested": plan.requested,
            "placed": len(plan.placements),
            "failed": plan.failed,
            "placements": [
                {
                    "class": p.entry.class_name,
                    "seed": p.entry.seed,
                    "sample_index": p.entry.sample_index,
                    "rect": list(p.target.as_tuple()),
                }
                for p in plan.placements
            ],
        },
        ensure_ascii=False,
    )


def generate_synthetic_set(
    ds: DatasetIndex,
    pool: PoolIndex,
    stats: dict[str, ClassStats],
    cfg: CompositionConfig,
    count: int,
    out_root: Path | str,
    jobs: int | None = None,
) -> DatasetIndex:
    """Compose `count` synthetic images and write the output tree.

    Backgrounds are sampled with replacement from the configured source
    (negatives_only restricts to images with zero objects). Each output
    ordinal gets its own generator derived from (cfg.seed, ordinal), so any
    worker schedule produces identical bytes. The output mirrors the tiled
    layout (images/ + annotations/) plus a composition audit log.
    """
    if count < 1:
        raise ConfigError(f"count must be >= 1, got {count}")
    if cfg.background_source == BACKGROUND_NEGATIVES:
        backgrounds = list(ds.negatives())
    else:
        backgrounds = list(ds.images)
    if not backgrounds:
        raise CompositionError(
            f"no backgrounds available under source {cfg.background_source!r}"
        )
    backgrounds.sort(key=lambda im: im.image_id)

    out_root = Path(out_root)
    images_dir = out_root / "images"
    annotations_dir = out_root / "annotations"
    images_dir.mkdir(parents=True, exist_ok=True)
    annotations_dir.mkdir(parents=True, exist_ok=True)

    # Probe eligibility once so an impossible configuration fails fast
    # instead of failing inside a worker.
    if not eligible_classes(pool, stats, cfg):
        raise CompositionError("no eligible class: pool, stats, and filter share no class")

    def run(ordinal: int) -> tuple[ImageRecord, str]:
        rng = make_rng(cfg.seed, ordinal)
        background = backgrounds[int(rng.integers(0, len(backgrounds)))]
        canvas, records, plan = compose_image(background, pool, stats, cfg, rng)
        image_id = f"syn_{ordinal:06d}"
        image_path = images_dir / f"{image_id}.png"
        canvas.save(image_path, format="PNG")
        (annotations_dir / f"{image_id}.txt").write_text(
            write_dota_annotation(records), encoding="utf-8"
        )
        record = ImageRecord(
            image_id=image_id,
            path=image_path,
            width=canvas.width,
            height=canvas.height,
            objects=tuple(records),
        )
        return record, _audit_line(image_id, plan)

    workers = max(1, jobs if jobs is not None else (os.cpu_count() or 1))
    with ThreadPoolExecutor(max_workers=workers) as pool_executor:
        results = list(pool_executor.map(run, range(count)))

    (out_root / AUDIT_LOG_NAME).write_text(
        "".join(line + "\n" for _, line in results), encoding="utf-8"
    )
    images = [record for record, _ in results]
    return DatasetIndex.build(out_root, images, declared_classes=ds.class_names)
