"""Per-class geometry and frequency statistics driving sampling and composition.

Area is the hbox area in squared pixels; aspect ratio is hbox width over
height. Statistics keep the full empirical lists (and the paired per-instance
values the compositor resamples from), stored in canonical sorted order so a
dataset permuted in image order yields identical stats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .records import DatasetIndex


@dataclass(frozen=True)
class ClassStats:
    class_name: str
    image_count: int
    instance_count: int
    areas: tuple[float, ...]
    aspect_ratios: tuple[float, ...]
    pairs: tuple[tuple[float, float], ...]
    area_range: tuple[float, float] | None
    aspect_range: tuple[float, float] | None

    def __post_init__(self) -> None:
        if not (len(self.areas) == len(self.aspect_ratios) == len(self.pairs) == self.instance_count):
            raise ConfigError(f"{self.class_name}: inconsistent stats lengths")
        if self.image_count > self.instance_count:
            raise ConfigError(f"{self.class_name}: image_count exceeds instance_count")

    @classmethod
    def from_pairs(
        cls, class_name: str, pairs: list[tuple[float, float]], image_count: int
    ) -> "ClassStats":
        """Build stats from per-instance (area, aspect) pairs."""
        ordered = tuple(sorted(pairs))
        areas = tuple(sorted(a for a, _ in ordered))
        aspects = tuple(sorted(r for _, r in ordered))
        return cls(
            class_name=class_name,
            image_count=image_count,
            instance_count=len(ordered),
            areas=areas,
            aspect_ratios=aspects,
            pairs=ordered,
            area_range=(areas[0], areas[-1]) if areas else None,
            aspect_range=(aspects[0], aspects[-1]) if aspects else None,
        )


@dataclass(frozen=True)
class LongTailPolicy:
    """A class is long-tail when it appears in at most max_images images."""

    max_images: int = 200

    def __post_init__(self) -> None:
        if self.max_images < 1:
            raise ConfigError(f"max_images must be >= 1, got {self.max_images}")


def compute_class_stats(ds: DatasetIndex) -> dict[str, ClassStats]:
    """Exact per-class counts and empirical geometry lists.

    Classes declared in the index but absent from objects get zero counts and
    empty lists. The result is keyed in index class order.
    """
    pairs: dict[str, list[tuple[float, float]]] = {name: [] for name in ds.class_names}
    image_sets: dict[str, set[str]] = {name: set() for name in ds.class_names}
    for img in ds.images:
        for obj in img.objects:
            box = obj.hbox
            pairs[obj.class_name].append((box.area, box.aspect))
            image_sets[obj.class_name].add(img.image_id)
    return {
        name: ClassStats.from_pairs(name, pairs[name], len(image_sets[name]))
        for name in ds.class_names
    }


def long_tail_classes(stats: dict[str, ClassStats], policy: LongTailPolicy) -> list[str]:
    """Classes with 0 < image_count <= max_images, ascending by count then name.

    Absent classes (zero images) are not long-tail; they are missing.
    """
    eligible = [
        s for s in stats.values() if 0 < s.image_count <= policy.max_images
    ]
    eligible.sort(key=lambda s: (s.image_count, s.class_name))
    return [s.class_name for s in eligible]


def _deciles(values: tuple[float, ...]) -> list[float]:
    if not values:
        return []
    return [float(q) for q in np.quantile(np.asarray(values), np.linspace(0.0, 1.0, 11))]


def stats_to_dict(stats: dict[str, ClassStats]) -> dict:
    """JSON-ready form consumed by the compositor and the report module."""
    classes = {}
    for name, s in stats.items():
        classes[name] = {
            "image_count": s.image_count,
            "instance_count": s.instance_count,
            "area_range": list(s.area_range) if s.area_range else None,
            "aspect_range": list(s.aspect_range) if s.aspect_range else None,
            "area_deciles": _deciles(s.areas),
            "aspect_deciles": _deciles(s.aspect_ratios),
            "instances": [[a, r] for a, r in s.pairs],
        }
    return {"classes": classes}


def save_stats(stats: dict[str, ClassStats], path: Path | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(stats_to_dict(stats), indent=2) + "\n", encoding="utf-8")


def load_stats(path: Path | str) -> dict[str, ClassStats]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    stats = {}
    for name, entry in doc["classes"].items():
        stats[name] = ClassStats.from_pairs(
            name,
            [(float(a), float(r)) for a, r in entry["instances"]],
            int(entry["image_count"]),
        )
    return stats
