"""Ingest and generate instance pools.

A pool is a filesystem contract, not an API: one subdirectory per class,
files named "seed<k>_<i>.png". Any generator that fills the layout (the SD
adapter, a GAN, the mock generator below) is a valid source, which keeps the
GPU-bound synthesis stage fully decoupled from this package.
"""

from __future__ import annotations

import colorsys
import hashlib
import logging
import random
import re
from dataclasses import dataclass
from pathlib import Path

from PIL import Image

from .errors import ConfigError, PoolError
from .seeding import derive_seed

log = logging.getLogger(__name__)

POOL_FILE_RE = re.compile(r"^seed(\d+)_(\d+)\.png$")

MOCK_SIZE_RANGE = (16, 96)


@dataclass(frozen=True)
class PoolEntry:
    class_name: str
    seed: int
    sample_index: int
    path: Path
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise PoolError(f"{self.path}: entry extents must be positive")


@dataclass(frozen=True)
class PoolIndex:
    """Entries in canonical order (class, seed, sample_index), plus warnings."""

    root: Path
    entries: tuple[PoolEntry, ...]
    warnings: tuple[str, ...] = ()

    def classes(self) -> list[str]:
        return sorted({e.class_name for e in self.entries})

    def entries_for(self, class_name: str) -> tuple[PoolEntry, ...]:
        return tuple(e for e in self.entries if e.class_name == class_name)

    def per_class_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for e in self.entries:
            counts[e.class_name] = counts.get(e.class_name, 0) + 1
        return dict(sorted(counts.items()))


def ingest_pool(root: Path | str) -> PoolIndex:
    """Index every decodable pool entry under root.

    Undecodable or mis-named files are skipped with a warning; an entirely
    empty pool is an error. Directory traversal order never matters: entries
    come out sorted by (class, seed, sample_index).
    """
    root = Path(root)
    if not root.is_dir():
        raise PoolError(f"pool root not found: {root}")
    entries: list[PoolEntry] = []
    warnings: list[str] = []
    for class_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for file in sorted(class_dir.iterdir()):
            match = POOL_FILE_RE.match(file.name)
            if not match:
                warnings.append(f"{file}: name does not match seed<k>_<i>.png, skipped")
                continue
            try:
                with Image.open(file) as im:
                    im.load()
                    width, height = im.size
            except Exception as exc:
                warnings.append(f"{file}: undecodable ({exc}), skipped")
                continue
            entries.append(
                PoolEntry(
                    class_name=class_dir.name,
                    seed=int(match.group(1)),
                    sample_index=int(match.group(2)),
                    path=file,
                    width=width,
                    height=height,
                )
            )
    if not entries:
        raise PoolError(f"empty pool: no valid entries under {root}")
    for warning in warnings:
        log.warning("%s", warning)
    entries.sort(key=lambda e: (e.class_name, e.seed, e.sample_index))
    return PoolIndex(root=root, entries=tuple(entries), warnings=tuple(warnings))


def _class_color(class_name: str) -> tuple[int, int, int]:
    # Hue from a stable hash of the class name; full-ish saturation so
    # classes are visually distinct in composed output.
    digest = hashlib.sha256(class_name.encode("utf-8")).digest()
    hue = digest[0] / 256.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.65, 0.9)
    return int(r * 255), int(g * 255), int(b * 255)


def make_mock_pool(
    classes: list[str] | tuple[str, ...], per_class: int, seed: int, out: Path | str
) -> PoolIndex:
    """Generate a deterministic synthetic pool in the ingest layout.

    Entries are flat-color rectangles with a class-hashed hue and sizes drawn
    from a fixed range; a test double for the diffusion stage, so the rest of
    the pipeline needs no GPU. Same arguments produce identical bytes.
    """
    if per_class < 1:
        raise ConfigError(f"per_class must be >= 1, got {per_class}")
    if not classes:
        raise ConfigError("classes must be non-empty")
    out = Path(out)
    for class_name in classes:
        class_dir = out / class_name
        class_dir.mkdir(parents=True, exist_ok=True)
        rng = random.Random(derive_seed(seed, class_name))
        color = _class_color(class_name)
        for i in range(per_class):
            width = rng.randint(*MOCK_SIZE_RANGE)
            height = rng.randint(*MOCK_SIZE_RANGE)
            # Spread samples over seed directories 0..19 the way a seeded
            # batch generator would.
            file = class_dir / f"seed{i % 20}_{i // 20}.png"
            Image.new("RGB", (width, height), color).save(file, format="PNG")
    return ingest_pool(out)
