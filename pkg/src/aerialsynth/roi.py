"""Sparse-to-dense ROI extraction and finetune-set assembly.

Crops every ground-truth object with a context margin, attaches the fixed
text prompt "birdview of <classname>", and assembles the balanced,
size-constrained finetune set. Two sampling strategies are supported:

  uniform_sample   - uniform over all crops of a class, regardless of size
  min_res_control  - uniform over crops at least min_size x min_size

Both cap the per-class sample at per_class_cap, drawing without replacement
with a per-class sub-seeded generator, so adding one class never perturbs
another class's sample.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass
from pathlib import Path

from PIL import Image

from .errors import ConfigError
from .geometry import HBox
from .records import DatasetIndex
from .seeding import derive_seed

log = logging.getLogger(__name__)

PROMPT_PREFIX = "birdview of "

STRATEGY_UNIFORM = "uniform_sample"
STRATEGY_MIN_RES = "min_res_control"
_STRATEGIES = (STRATEGY_UNIFORM, STRATEGY_MIN_RES)


def make_prompt(class_name: str) -> str:
    return PROMPT_PREFIX + class_name


def expand_box(box: HBox, margin: float, image_w: int, image_h: int) -> HBox:
    """Grow each side of a box by `margin` pixels, clamped to the image."""
    return HBox(
        max(0.0, box.xmin - margin),
        max(0.0, box.ymin - margin),
        min(float(image_w), box.xmax + margin),
        min(float(image_h), box.ymax + margin),
    )


@dataclass(frozen=True)
class CropRecord:
    """An extracted ROI paired with its text prompt.

    crop_rect is the post-margin rectangle actually cropped, in source-image
    coordinates, snapped outward to whole pixels and clamped to the image.
    """

    crop_id: str
    source_image_id: str
    class_name: str
    crop_rect: HBox
    prompt: str
    width: int
    height: int
    output_path: Path

    def __post_init__(self) -> None:
        if self.prompt != make_prompt(self.class_name):
            raise ConfigError(
                f"{self.crop_id}: prompt {self.prompt!r} does not match the template"
            )
        if self.width < 1 or self.height < 1:
            raise ConfigError(f"{self.crop_id}: crop extents must be positive")


@dataclass(frozen=True)
class SamplingConfig:
    strategy: str = STRATEGY_MIN_RES
    min_size: int = 15
    per_class_cap: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        if self.strategy not in _STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}, expected one of {_STRATEGIES}")
        if self.min_size < 1:
            raise ConfigError(f"min_size must be >= 1, got {self.min_size}")
        if self.per_class_cap < 1:
            raise ConfigError(f"per_class_cap must be >= 1, got {self.per_class_cap}")


@dataclass(frozen=True)
class ManifestEntry:
    crop_id: str
    path: str
    prompt: str
    class_name: str


@dataclass(frozen=True)
class PromptManifest:
    """The retained finetune set; the sole contract with the SD adapter."""

    entries: tuple[ManifestEntry, ...]
    seed: int
    strategy: str
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        ids = [e.crop_id for e in self.entries]
        if len(ids) != len(set(ids)):
            raise ConfigError("manifest entries must be unique by crop_id")


@dataclass(frozen=True)
class ExtractionResult:
    crops: tuple[CropRecord, ...]
    errors: tuple[str, ...] = ()


def _integer_rect(rect: HBox, image_w: int, image_h: int) -> tuple[int, int, int, int]:
    x0 = max(0, math.floor(rect.xmin))
    y0 = max(0, math.floor(rect.ymin))
    x1 = min(image_w, math.ceil(rect.xmax))
    y1 = min(image_h, math.ceil(rect.ymax))
    return x0, y0, x1, y1


def extract_crops(ds: DatasetIndex, margin: float, out_dir: Path | str) -> ExtractionResult:
    """Crop every object at its margin-expanded rectangle, one PNG per object.

    Crops land in out_dir/<class>/<crop_id>.png with crop_id
    "<image_id>_obj<k>"; decode failures skip the image and are reported in
    the result, not raised.
    """
    out_dir = Path(out_dir)
    crops: list[CropRecord] = []
    errors: list[str] = []
    for img in ds.images:
        if not img.objects:
            continue
        try:
            with Image.open(img.path) as source:
                source.load()
                for k, obj in enumerate(img.objects):
                    expanded = expand_box(obj.hbox, margin, img.width, img.height)
                    x0, y0, x1, y1 = _integer_rect(expanded, img.width, img.height)
                    crop_id = f"{img.image_id}_obj{k}"
                    out_path = out_dir / obj.class_name / f"{crop_id}.png"
                    out_path.parent.mkdir(parents=True, exist_ok=True)
                    source.crop((x0, y0, x1, y1)).save(out_path, format="PNG")
                    crops.append(
                        CropRecord(
                            crop_id=crop_id,
                            source_image_id=img.image_id,
                            class_name=obj.class_name,
                            crop_rect=HBox(float(x0), float(y0), float(x1), float(y1)),
                            prompt=make_prompt(obj.class_name),
                            width=x1 - x0,
                            height=y1 - y0,
                            output_path=out_path,
                        )
                    )
        except OSError as exc:
            log.warning("crop failure: %s: %s", img.image_id, exc)
            errors.append(f"{img.image_id}: {exc}")
    return ExtractionResult(crops=tuple(crops), errors=tuple(errors))


def sample_finetune_set(
    crops: list[CropRecord] | tuple[CropRecord, ...], cfg: SamplingConfig
) -> PromptManifest:
    """Assemble the finetune set: filter by strategy, cap per class, sample.

    Entries are grouped by class in class-name order; within a class the
    sampled subset is listed by crop_id for byte-stable manifests.
    """
    by_class: dict[str, list[CropRecord]] = {}
    for crop in crops:
        by_class.setdefault(crop.class_name, []).append(crop)

    entries: list[ManifestEntry] = []
    warnings: list[str] = []
    for class_name in sorted(by_class):
        candidates = sorted(by_class[class_name], key=lambda c: c.crop_id)
        if cfg.strategy == STRATEGY_MIN_RES:
            candidates = [
                c for c in candidates if c.width >= cfg.min_size and c.height >= cfg.min_size
            ]
        if not candidates:
            warnings.append(
                f"{class_name}: no crops of at least {cfg.min_size}x{cfg.min_size}, class omitted"
            )
            continue
        k = min(cfg.per_class_cap, len(candidates))
        rng = random.Random(derive_seed(cfg.seed, class_name))
        selected = sorted(rng.sample(candidates, k), key=lambda c: c.crop_id)
        entries.extend(
            ManifestEntry(
                crop_id=c.crop_id,
                path=str(c.output_path),
                prompt=c.prompt,
                class_name=c.class_name,
            )
            for c in selected
        )
    return PromptManifest(
        entries=tuple(entries), seed=cfg.seed, strategy=cfg.strategy, warnings=tuple(warnings)
    )


def _portable_path(target: str | Path, base: Path) -> str:
    """Path string relative to `base` when possible, else absolute.

    Keeps serialized manifests byte-identical across output roots and lets a
    manifest move together with the crops it references.
    """
    target = Path(target)
    try:
        return target.relative_to(base).as_posix()
    except ValueError:
        return str(target)


def _resolve_path(stored: str, base: Path) -> Path:
    path = Path(stored)
    return path if path.is_absolute() else base / path


def save_manifest(manifest: PromptManifest, path: Path | str) -> None:
    """JSON Lines, one object per entry: crop_id, path, prompt, class.

    Entry paths are stored relative to the manifest's directory when the
    crops live under it.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        json.dumps(
            {
                "crop_id": e.crop_id,
                "path": _portable_path(e.path, path.parent),
                "prompt": e.prompt,
                "class": e.class_name,
            },
            ensure_ascii=False,
        )
        for e in manifest.entries
    ]
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_manifest_entries(path: Path | str) -> list[ManifestEntry]:
    path = Path(path)
    entries = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        entries.append(
            ManifestEntry(
                crop_id=obj["crop_id"],
                path=str(_resolve_path(obj["path"], path.parent)),
                prompt=obj["prompt"],
                class_name=obj["class"],
            )
        )
    return entries


def save_crop_records(crops: tuple[CropRecord, ...] | list[CropRecord], path: Path | str) -> None:
    """Persist crop metadata (JSON Lines) so sampling can run as its own stage."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for c in crops:
        lines.append(
            json.dumps(
                {
                    "crop_id": c.crop_id,
                    "source_image_id": c.source_image_id,
                    "class": c.class_name,
                    "rect": list(c.crop_rect.as_tuple()),
                    "prompt": c.prompt,
                    "width": c.width,
                    "height": c.height,
                    "path": _portable_path(c.output_path, path.parent),
                },
                ensure_ascii=False,
            )
        )
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_crop_records(path: Path | str) -> list[CropRecord]:
    path = Path(path)
    crops = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        crops.append(
            CropRecord(
                crop_id=obj["crop_id"],
                source_image_id=obj["source_image_id"],
                class_name=obj["class"],
                crop_rect=HBox(*obj["rect"]),
                prompt=obj["prompt"],
                width=int(obj["width"]),
                height=int(obj["height"]),
                output_path=_resolve_path(obj["path"], path.parent),
            )
        )
    return crops
