"""Shared fixtures: deterministic synthetic images and on-disk datasets."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from PIL import Image


def gradient_image(width: int, height: int, phase: int = 0) -> Image.Image:
    """Deterministic non-uniform RGB content, distinct per phase.

    Gradients (rather than flat fills) make pixel-fidelity checks strict:
    an off-by-one paste or crop shows up immediately.
    """
    x = np.arange(width, dtype=np.int32)[None, :]
    y = np.arange(height, dtype=np.int32)[:, None]
    r = ((x * 3 + y * 0 + phase) % 256).astype(np.uint8)
    g = ((y * 5 + phase * 2) % 256).astype(np.uint8)
    b = (((x + y) * 2 + phase * 3) % 256).astype(np.uint8)
    r, g, b = np.broadcast_arrays(r, g, b)
    return Image.fromarray(np.stack([r, g, b], axis=-1), mode="RGB")


def quad_line(xmin: float, ymin: float, xmax: float, ymax: float, class_name: str,
              difficult: int = 0) -> str:
    """DOTA line for an axis-aligned box, clockwise from the top-left."""
    def fmt(v: float) -> str:
        return str(int(v)) if v == int(v) else repr(v)

    coords = [xmin, ymin, xmax, ymin, xmax, ymax, xmin, ymax]
    return " ".join(fmt(c) for c in coords) + f" {class_name} {difficult}"


def write_dota_dataset(root: Path, specs: list[tuple[str, int, int, list[str] | None]]) -> Path:
    """Write images plus optional annotation files.

    specs: (stem, width, height, annotation_lines). annotation_lines=None
    writes no annotation file (a negative image).
    """
    (root / "images").mkdir(parents=True, exist_ok=True)
    (root / "annotations").mkdir(parents=True, exist_ok=True)
    for i, (stem, width, height, lines) in enumerate(specs):
        gradient_image(width, height, phase=i * 7 + 1).save(root / "images" / f"{stem}.png")
        if lines is not None:
            (root / "annotations" / f"{stem}.txt").write_text(
                "".join(line + "\n" for line in lines), encoding="utf-8"
            )
    return root


@pytest.fixture
def small_dataset(tmp_path: Path) -> Path:
    """Two annotated images, one empty-annotation image, two negatives."""
    return write_dota_dataset(
        tmp_path / "ds",
        [
            (
                "scene_a",
                300,
                200,
                [
                    quad_line(60, 50, 100, 90, "plane"),
                    quad_line(150, 30, 210, 60, "ship"),
                    quad_line(20, 120, 50, 180, "plane", difficult=1),
                ],
            ),
            (
                "scene_b",
                256,
                256,
                [
                    quad_line(10, 10, 42, 26, "ship"),
                    quad_line(100, 100, 140, 140, "helipad"),
                ],
            ),
            ("scene_c", 128, 128, []),
            ("neg_1", 256, 256, None),
            ("neg_2", 200, 180, None),
        ],
    )


@pytest.fixture
def pipeline_dataset(tmp_path: Path) -> Path:
    """Larger-than-tile images so the full pipeline exercises real tiling."""
    lines_a = [
        quad_line(100, 100, 180, 160, "plane"),
        quad_line(400, 80, 470, 130, "plane"),
        quad_line(300, 400, 420, 460, "ship"),
        quad_line(600, 300, 640, 360, "helipad"),
        quad_line(50, 500, 120, 560, "ship"),
    ]
    lines_b = [
        quad_line(200, 150, 260, 220, "plane"),
        quad_line(500, 450, 590, 520, "ship"),
        quad_line(100, 300, 128, 330, "helipad"),
    ]
    return write_dota_dataset(
        tmp_path / "pipeline_ds",
        [
            ("big_a", 700, 640, lines_a),
            ("big_b", 700, 600, lines_b),
            ("bg_a", 600, 600, None),
            ("bg_b", 560, 560, None),
        ],
    )
